//
// Copyright 2026 The userdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef USERDP_ERRORS_H_
#define USERDP_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace userdp {

// Base of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller passed an argument outside an operation's domain (bad index,
// out-of-range parameter).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A mechanism or schedule was configured in a way its guarantees cannot
// cover (too few users, non-strongly-convex objective, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed external input: CSV rows, JSON config documents.
class DataError : public Error {
 public:
  using Error::Error;
};

// The requested computation exceeds an enumeration budget.
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// An iterative solver could not certify the requested accuracy. The best
// iterate seen so far, and its certified distance bound, travel with it.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Eigen::VectorXd best_iterate,
              double best_bound)
      : Error(what),
        best_iterate_(std::move(best_iterate)),
        best_bound_(best_bound) {}

  const Eigen::VectorXd& best_iterate() const { return best_iterate_; }
  double best_bound() const { return best_bound_; }

 private:
  Eigen::VectorXd best_iterate_;
  double best_bound_;
};

}  // namespace userdp

#endif  // USERDP_ERRORS_H_
