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

#include "userdp/dataset.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>

#include "userdp/errors.h"

namespace userdp {

UserDataset::UserDataset(ItemMatrix items, Index n, Index m)
    : items_(std::move(items)), n_(n), m_(m) {
  if (n < 1 || m < 1) throw ArgumentError("dataset needs n >= 1 and m >= 1");
  if (items_.cols() < 1) throw ArgumentError("dataset needs d >= 1");
  if (items_.rows() != n * m) {
    throw ArgumentError("item matrix has " + std::to_string(items_.rows()) +
                        " rows, expected n*m = " + std::to_string(n * m));
  }
}

Vector UserDataset::mean() const {
  return items_.colwise().mean().transpose();
}

Vector UserDataset::user_mean(Index i) const {
  if (i < 0 || i >= n_) throw ArgumentError("user index out of range");
  return user(i).colwise().mean().transpose();
}

UserDataset delete_users(const UserDataset& ds, const std::vector<Index>& S) {
  const Index n = ds.num_users();
  std::vector<bool> gone(n, false);
  for (Index i : S) {
    if (i < 0 || i >= n) {
      throw ArgumentError("delete_users: user index " + std::to_string(i) +
                          " out of range for n = " + std::to_string(n));
    }
    gone[i] = true;
  }
  const Index kept = std::count(gone.begin(), gone.end(), false);
  if (kept == 0) throw ArgumentError("delete_users: would delete every user");
  const Index m = ds.items_per_user();
  ItemMatrix out(kept * m, ds.dim());
  Index row = 0;
  for (Index i = 0; i < n; ++i) {
    if (gone[i]) continue;
    out.middleRows(row, m) = ds.user(i);
    row += m;
  }
  return UserDataset(std::move(out), kept, m);
}

UserDataset user_range(const UserDataset& ds, Index first, Index end) {
  if (first < 0 || end > ds.num_users() || first >= end)
    throw ArgumentError("user_range: bad range");
  const Index m = ds.items_per_user();
  return UserDataset(ds.items().middleRows(first * m, (end - first) * m),
                     end - first, m);
}

Permuted permute(const UserDataset& ds, RandomSource& rng) {
  const Index N = ds.num_items();
  std::vector<Index> p(N);
  for (Index k = 0; k < N; ++k) p[k] = k;
  for (Index k = N - 1; k > 0; --k) {
    const auto j = static_cast<Index>(rng.uniform_index(k + 1));
    std::swap(p[k], p[j]);
  }
  ItemMatrix out(N, ds.dim());
  for (Index k = 0; k < N; ++k) out.row(k) = ds.items().row(p[k]);
  return {UserDataset(std::move(out), ds.num_users(), ds.items_per_user()),
          std::move(p)};
}

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(',', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, long line_no) {
  s = trim(s);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line_no) + ": bad number '" +
                    std::string(s) + "'");
  }
  return v;
}

}  // namespace

UserDataset read_dataset_csv(std::istream& in, Index expected_m) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty dataset file");
  const auto header = split_commas(trim(line));
  if (header.size() < 2 || trim(header[0]) != "user_id") {
    throw DataError("header must be user_id,dim_0,...");
  }
  const Index d = static_cast<Index>(header.size()) - 1;

  std::vector<double> values;
  std::vector<std::string> seen_users;
  std::vector<Index> counts;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const auto fields = split_commas(row);
    if (static_cast<Index>(fields.size()) != d + 1) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(d + 1) + " fields");
    }
    const std::string uid(trim(fields[0]));
    if (seen_users.empty() || seen_users.back() != uid) {
      if (std::find(seen_users.begin(), seen_users.end(), uid) !=
          seen_users.end()) {
        throw DataError("line " + std::to_string(line_no) + ": rows of user '" +
                        uid + "' are not contiguous");
      }
      seen_users.push_back(uid);
      counts.push_back(0);
    }
    ++counts.back();
    for (Index k = 1; k <= d; ++k) values.push_back(parse_double(fields[k], line_no));
  }
  if (seen_users.empty()) throw DataError("dataset has no rows");
  const Index m = expected_m > 0 ? expected_m : counts.front();
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] != m) {
      throw DataError("user '" + seen_users[i] + "' has " +
                      std::to_string(counts[i]) + " rows, expected " +
                      std::to_string(m));
    }
  }
  const Index n = static_cast<Index>(seen_users.size());
  ItemMatrix items =
      Eigen::Map<const ItemMatrix>(values.data(), n * m, d);
  return UserDataset(std::move(items), n, m);
}

UserDataset read_dataset_csv_file(const std::string& path, Index expected_m) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return read_dataset_csv(in, expected_m);
}

void write_dataset_csv(std::ostream& out, const UserDataset& ds) {
  out << "user_id";
  for (Index k = 0; k < ds.dim(); ++k) out << ",dim_" << k;
  out << '\n';
  char buf[32];
  for (Index i = 0; i < ds.num_users(); ++i) {
    for (Index j = 0; j < ds.items_per_user(); ++j) {
      out << i;
      for (Index k = 0; k < ds.dim(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g", ds.item(i, j)(k));
        out << ',' << buf;
      }
      out << '\n';
    }
  }
}

void write_dataset_csv_file(const std::string& path, const UserDataset& ds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  write_dataset_csv(out, ds);
}

}  // namespace userdp
