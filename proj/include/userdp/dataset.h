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

#ifndef USERDP_DATASET_H_
#define USERDP_DATASET_H_

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "userdp/random.h"

namespace userdp {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using ItemMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// n users, each holding exactly m items in R^d. Items are rows of a
// row-major (n*m) x d matrix, user i owning rows [i*m, (i+1)*m).
//
// Immutable once built; every transformation returns a new dataset.
class UserDataset {
 public:
  UserDataset(ItemMatrix items, Index n, Index m);

  Index num_users() const { return n_; }
  Index items_per_user() const { return m_; }
  Index dim() const { return items_.cols(); }
  Index num_items() const { return items_.rows(); }

  const ItemMatrix& items() const { return items_; }

  auto user(Index i) const { return items_.middleRows(i * m_, m_); }
  auto item(Index i, Index j) const { return items_.row(i * m_ + j); }

  Vector mean() const;
  Vector user_mean(Index i) const;

 private:
  ItemMatrix items_;
  Index n_;
  Index m_;
};

// x_{-S}. S holds 0-based user indices; duplicates are ignored. Survivors
// keep their relative order.
UserDataset delete_users(const UserDataset& ds, const std::vector<Index>& S);

// Users [first, end) as a new dataset, order kept.
UserDataset user_range(const UserDataset& ds, Index first, Index end);

struct Permuted {
  UserDataset data;
  // Row k of data is row permutation[k] of the input.
  std::vector<Index> permutation;
};

// Uniform relabeling of all n*m items (Fisher-Yates).
Permuted permute(const UserDataset& ds, RandomSource& rng);

// CSV with header "user_id,dim_0,...". Rows of one user must be
// contiguous. If expected_m > 0 every user must hold exactly that many
// rows; otherwise the first user fixes m.
UserDataset read_dataset_csv(std::istream& in, Index expected_m = 0);
UserDataset read_dataset_csv_file(const std::string& path,
                                  Index expected_m = 0);
void write_dataset_csv(std::ostream& out, const UserDataset& ds);
void write_dataset_csv_file(const std::string& path, const UserDataset& ds);

}  // namespace userdp

#endif  // USERDP_DATASET_H_
