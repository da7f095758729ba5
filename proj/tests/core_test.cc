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

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "userdp/dataset.h"
#include "userdp/errors.h"
#include "userdp/loss.h"
#include "userdp/privacy.h"
#include "userdp/random.h"
#include "userdp/region.h"

namespace userdp {
namespace {

UserDataset scalars(std::initializer_list<double> values, Index m = 1) {
  ItemMatrix items(static_cast<Index>(values.size()), 1);
  Index k = 0;
  for (double v : values) items(k++, 0) = v;
  return UserDataset(items, items.rows() / m, m);
}

TEST(RandomSourceTest, SameSeedSameStream) {
  RandomSource a(7), b(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomSourceTest, ChildrenDifferByLabel) {
  RandomSource root(7);
  RandomSource a = root.child("a"), b = root.child("b"), a2 = root.child("a");
  const auto x = a.next_u64();
  EXPECT_NE(x, b.next_u64());
  EXPECT_EQ(x, a2.next_u64());
}

// Pins the integer stream so cross-platform drift is caught.
TEST(RandomSourceTest, IntegerStreamIsPinned) {
  RandomSource rng(42);
  std::vector<std::uint64_t> first;
  for (int i = 0; i < 3; ++i) first.push_back(rng.uniform_index(1000));
  RandomSource again(42);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(first[i], again.uniform_index(1000));
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
}

TEST(RandomSourceTest, UniformRanges) {
  RandomSource rng(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform01();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    const double v = rng.uniform_open_low();
    EXPECT_GT(v, 0.0);
    EXPECT_LE(v, 1.0);
    EXPECT_LT(rng.uniform_index(3), 3u);
  }
}

TEST(UserDatasetTest, RejectsBadShapes) {
  EXPECT_THROW(UserDataset(ItemMatrix(3, 1), 2, 2), ArgumentError);
  EXPECT_THROW(UserDataset(ItemMatrix(0, 1), 0, 1), ArgumentError);
}

TEST(DeleteUsersTest, DropsLastUser) {
  const UserDataset ds = scalars({1, 2, 3});
  const UserDataset out = delete_users(ds, {2});
  ASSERT_EQ(out.num_users(), 2);
  EXPECT_EQ(out.item(0, 0)(0), 1);
  EXPECT_EQ(out.item(1, 0)(0), 2);
}

TEST(DeleteUsersTest, EmptySetIsIdentity) {
  const UserDataset ds = scalars({1, 2, 3, 4}, 2);
  const UserDataset out = delete_users(ds, {});
  EXPECT_EQ(out.items(), ds.items());
  EXPECT_EQ(out.items_per_user(), 2);
}

TEST(DeleteUsersTest, KeepsSingleSurvivor) {
  const UserDataset ds = scalars({0, 0, 3});
  const UserDataset out = delete_users(ds, {0, 2});
  ASSERT_EQ(out.num_users(), 1);
  EXPECT_EQ(out.item(0, 0)(0), 0);
  EXPECT_EQ(ds.num_users(), 3);
}

TEST(DeleteUsersTest, OutOfRange) {
  EXPECT_THROW(delete_users(scalars({1, 2}), {2}), ArgumentError);
  EXPECT_THROW(delete_users(scalars({1, 2}), {-1}), ArgumentError);
}

// (x_{-S})_{-S'} equals x_{-(S u S'')} where S'' maps S' back to original
// indices.
TEST(DeleteUsersTest, ComposesExhaustively) {
  for (Index n = 1; n <= 5; ++n) {
    ItemMatrix items(n, 1);
    for (Index i = 0; i < n; ++i) items(i, 0) = 10.0 * i;
    const UserDataset ds(items, n, 1);
    for (unsigned S = 0; S < (1u << n); ++S) {
      std::vector<Index> first, alive;
      for (Index i = 0; i < n; ++i) (S >> i & 1 ? first : alive).push_back(i);
      if (alive.empty()) continue;
      const UserDataset once = delete_users(ds, first);
      const Index k = static_cast<Index>(alive.size());
      for (unsigned T = 0; T + 1 < (1u << k); ++T) {
        std::vector<Index> second, combined = first;
        for (Index j = 0; j < k; ++j) {
          if (T >> j & 1) {
            second.push_back(j);
            combined.push_back(alive[j]);
          }
        }
        std::sort(combined.begin(), combined.end());
        EXPECT_EQ(delete_users(once, second).items(),
                  delete_users(ds, combined).items());
      }
    }
  }
}

TEST(PermuteTest, SingleItemIsIdentity) {
  RandomSource rng(3);
  const UserDataset ds = scalars({5});
  const Permuted p = permute(ds, rng);
  EXPECT_EQ(p.data.items(), ds.items());
  EXPECT_EQ(p.permutation, std::vector<Index>{0});
}

TEST(PermuteTest, TwoItemsUniform) {
  const UserDataset ds = scalars({0, 1});
  long swapped = 0;
  const long seeds = 10000;
  for (long s = 0; s < seeds; ++s) {
    RandomSource rng(s);
    swapped += permute(ds, rng).permutation[0] == 1;
  }
  EXPECT_NEAR(static_cast<double>(swapped) / seeds, 0.5, 0.02);
}

TEST(PermuteTest, PreservesMultisetAndShape) {
  RandomSource rng(9);
  ItemMatrix items(12, 2);
  for (Index k = 0; k < 12; ++k) items.row(k) << k, -k;
  const UserDataset ds(items, 4, 3);
  const Permuted p = permute(ds, rng);
  EXPECT_EQ(p.data.num_users(), 4);
  EXPECT_EQ(p.data.items_per_user(), 3);
  std::multiset<double> before, after;
  for (Index k = 0; k < 12; ++k) {
    before.insert(ds.items()(k, 0));
    after.insert(p.data.items()(k, 0));
    EXPECT_EQ(p.data.items().row(k), ds.items().row(p.permutation[k]));
  }
  EXPECT_EQ(before, after);
}

TEST(PermuteTest, PreservesEmpiricalLoss) {
  RandomSource rng(11);
  ItemMatrix items = ItemMatrix::Random(30, 3);
  const UserDataset ds(items, 10, 3);
  const UserDataset x = permute(ds, rng).data;
  const LossPtr loss = make_logistic_loss(0.1, 2);
  for (int t = 0; t < 5; ++t) {
    const Vector theta = Vector::Random(3);
    EXPECT_NEAR(empirical_loss(*loss, ds, theta),
                empirical_loss(*loss, x, theta), 1e-12);
  }
}

TEST(DatasetCsvTest, RoundTrip) {
  ItemMatrix items = ItemMatrix::Random(6, 2);
  items(0, 0) = 1.0 / 3.0;
  const UserDataset ds(items, 3, 2);
  std::stringstream ss;
  write_dataset_csv(ss, ds);
  const UserDataset back = read_dataset_csv(ss);
  EXPECT_EQ(back.num_users(), 3);
  EXPECT_EQ(back.items_per_user(), 2);
  EXPECT_EQ(back.items(), ds.items());
}

TEST(DatasetCsvTest, RejectsMalformedInput) {
  std::stringstream bad_header("id,x\n0,1\n");
  EXPECT_THROW(read_dataset_csv(bad_header), DataError);
  std::stringstream ragged("user_id,dim_0\na,1\na,2\nb,3\n");
  EXPECT_THROW(read_dataset_csv(ragged), DataError);
  std::stringstream split("user_id,dim_0\na,1\nb,2\na,3\nb,4\n");
  EXPECT_THROW(read_dataset_csv(split), DataError);
  std::stringstream bad_number("user_id,dim_0\na,x\n");
  EXPECT_THROW(read_dataset_csv(bad_number), DataError);
  std::stringstream short_row("user_id,dim_0,dim_1\na,1\n");
  EXPECT_THROW(read_dataset_csv(short_row), DataError);
  std::stringstream wrong_m("user_id,dim_0\na,1\nb,2\n");
  EXPECT_THROW(read_dataset_csv(wrong_m, 2), DataError);
}

TEST(RegionTest, SingleBallProjection) {
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(2), 0.5);
  Vector p = K.project(Vector::Unit(2, 0));
  EXPECT_NEAR(p(0), 0.5, 1e-15);
  EXPECT_EQ(K.project(Vector::Constant(2, 0.1)), Vector::Constant(2, 0.1));
  EXPECT_DOUBLE_EQ(K.diameter(), 1.0);
}

TEST(RegionTest, UnboundedIsIdentity) {
  const FeasibleRegion K = FeasibleRegion::unbounded(3);
  const Vector v = Vector::Constant(3, 1e6);
  EXPECT_EQ(K.project(v), v);
  EXPECT_FALSE(K.bounded());
}

TEST(RegionTest, EmptyIntersectionRejected) {
  const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(2), 1);
  EXPECT_THROW(K.intersect(Ball{Vector::Constant(2, 5), 1}), ArgumentError);
  EXPECT_THROW(FeasibleRegion::ball(Vector::Zero(2), 0), ArgumentError);
}

// The projection beats every sampled point of the region, and is
// idempotent.
TEST(RegionTest, TwoAndThreeBallProjectionIsOptimal) {
  RandomSource rng(5);
  for (int t = 0; t < 50; ++t) {
    const FeasibleRegion K = FeasibleRegion::ball(Vector::Zero(2), 1)
                                 .intersect(Ball{Vector::Unit(2, 0) * 1.2, 0.8})
                                 .intersect(Ball{Vector::Unit(2, 1) * 0.3, 1.0});
    Vector theta(2);
    theta << 4 * rng.uniform01() - 2, 4 * rng.uniform01() - 2;
    const Vector p = K.project(theta);
    EXPECT_TRUE(K.contains(p, 1e-8));
    EXPECT_LE((K.project(p) - p).norm(), 1e-8);
    for (int s = 0; s < 400; ++s) {
      Vector q(2);
      q << 2 * rng.uniform01() - 1, 2 * rng.uniform01() - 1;
      if (!K.contains(q, 0)) continue;
      EXPECT_LE((p - theta).norm(), (q - theta).norm() + 1e-8);
    }
  }
}

TEST(PrivacyTest, KappaMatchesDefinition) {
  EXPECT_EQ(tdlap_kappa(1, std::exp(-2.0)), 3);
  EXPECT_EQ(tdlap_kappa(0.5, 0.1), 1 + static_cast<int>(std::ceil(std::log(10.0) / 0.5)));
}

TEST(PrivacyTest, DerivedConstants) {
  for (double eps : {0.1, 0.5, 1.0}) {
    for (double delta : {1e-6, 1e-3, 0.5}) {
      const OutputPertConstants c = output_pert_constants(eps, delta);
      EXPECT_EQ(c.eps_bar, eps / 2);
      EXPECT_LT(c.delta_bar, delta);
      EXPECT_GE(c.kappa, 2);
    }
  }
}

TEST(PrivacyTest, RangeEnforced) {
  EXPECT_THROW(PrivacyParams(0, 0.1), ArgumentError);
  EXPECT_THROW(PrivacyParams(1.5, 0.1), ArgumentError);
  EXPECT_THROW(PrivacyParams(1, 0.6), ArgumentError);
  EXPECT_NO_THROW(PrivacyParams(1, 0.5));
}

// Gradient norms stay below G on the region the constant was declared for.
TEST(LossTest, LipschitzSpotCheck) {
  RandomSource rng(2);
  const double R = 1;
  const LossPtr sq = make_squared_loss(0.5, 2 * 0.5 * (R + 1));
  const LossPtr logistic = make_logistic_loss(0.1, 1 + 0.1 * R);
  const LossPtr hinge = make_hinge_loss(0.1, 1 + 0.1 * R);
  const LossPtr dist = make_distance_loss();
  for (int t = 0; t < 1000; ++t) {
    Vector theta(3), x(3);
    for (Index k = 0; k < 3; ++k) {
      theta(k) = 2 * rng.uniform01() - 1;
      x(k) = 2 * rng.uniform01() - 1;
    }
    if (theta.norm() > R) theta /= theta.norm();
    if (x.norm() > 1) x /= x.norm();
    const Eigen::RowVectorXd row = x.transpose();
    for (const LossPtr& l : {sq, logistic, hinge, dist})
      EXPECT_LE(l->subgradient(theta, row).norm(), l->lipschitz() + 1e-12) << l->name();
  }
}

// value - (mu/2)|.|^2 satisfies the midpoint inequality.
TEST(LossTest, StrongConvexityMidpoint) {
  RandomSource rng(4);
  for (const LossPtr& l : {make_squared_loss(0.7, 1), make_logistic_loss(0.3, 1),
                           make_hinge_loss(0.2, 1)}) {
    const double mu = l->strong_convexity();
    for (int t = 0; t < 500; ++t) {
      Vector a = Vector::Random(2), b = Vector::Random(2);
      const Eigen::RowVectorXd x = Eigen::RowVectorXd::Random(2);
      auto h = [&](const Vector& v) { return l->value(v, x) - 0.5 * mu * v.squaredNorm(); };
      EXPECT_LE(h(0.5 * (a + b)), 0.5 * (h(a) + h(b)) + 1e-12) << l->name();
    }
  }
}

TEST(LossTest, SquaredClosedFormUsesRegularizer) {
  const LossPtr sq = make_squared_loss(0.5, 1);
  const UserDataset ds = scalars({2});
  const auto theta = sq->closed_form_minimizer(ds, Vector::Zero(1), 1,
                                               FeasibleRegion::unbounded(1));
  ASSERT_TRUE(theta.has_value());
  EXPECT_NEAR((*theta)(0), 1.0, 1e-15);
}

}  // namespace
}  // namespace userdp
