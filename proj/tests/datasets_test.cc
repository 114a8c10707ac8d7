// Copyright 2026 The Fairer NMF Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairnmf/datasets.hpp"
#include "fairnmf/nmf_standard.hpp"

namespace fairnmf {
namespace {

namespace fs = std::filesystem;

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fairnmf_datasets_" + std::string(
                ::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  fs::path dir_;
};

TEST(GenerateSynthetic, BenchmarkShapes) {
  const SyntheticSpec spec = SyntheticSpec::table1(0);
  const GroupedMatrix x = generate_synthetic(spec);
  ASSERT_EQ(x.num_groups(), 3u);
  EXPECT_EQ(x.cols(), 20);
  const std::vector<std::size_t> rows{1000, 500, 250};
  const std::vector<Index> ranks{3, 3, 6};
  for (std::size_t l = 0; l < 3; ++l) {
    EXPECT_EQ(x.group(l).rows.size(), rows[l]);
    EXPECT_EQ(spec.groups[l].rank, ranks[l]);
  }
  EXPECT_EQ(x.group(0).label, "large_low_rank");
  EXPECT_EQ(x.group(2).label, "small_high_rank");
}

TEST(GenerateSynthetic, BlocksHavePlantedRank) {
  for (std::uint64_t seed : {0u, 5u}) {
    const SyntheticSpec spec = SyntheticSpec::table1(seed);
    const GroupedMatrix x = generate_synthetic(spec);
    for (std::size_t l = 0; l < 3; ++l) {
      const Eigen::MatrixXd block = x.block(l);
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(block).singularValues();
      const Index r = spec.groups[l].rank;
      EXPECT_GT(sv(r - 1), 1e-6 * sv(0));
      for (Index i = r; i < sv.size(); ++i) EXPECT_LE(sv(i), 1e-10 * sv(0));
    }
  }
}

TEST(GenerateSynthetic, DeterministicAndEntrywiseRange) {
  const SyntheticSpec spec{{{"a", 20, 6, 2}, {"b", 10, 6, 3}}, 9};
  const GroupedMatrix a = generate_synthetic(spec);
  EXPECT_EQ(a.matrix(), generate_synthetic(spec).matrix());
  // Entries of a rank-r product of [0, 1) factors lie in [0, r).
  EXPECT_GE(a.matrix().minCoeff(), 0.0);
  EXPECT_LT(a.gather(a.matrix(), 1).maxCoeff(), 3.0);
  EXPECT_NE(a.matrix(), generate_synthetic(SyntheticSpec{spec.groups, 10}).matrix());
}

TEST(GenerateSynthetic, PlantedRankIsRecoverable) {
  const SyntheticSpec spec = SyntheticSpec::table1(1);
  const GroupedMatrix x = generate_synthetic(spec);
  for (std::size_t l = 0; l < 3; ++l) {
    NmfOptions o;
    o.rank = spec.groups[l].rank;
    o.max_iters = 5000;
    const FitResult r = nmf_mu(x.block(l), o);
    EXPECT_LE(frobenius_norm(x.block(l) - r.factors.W * r.factors.H) / x.norm(l), 0.02)
        << spec.groups[l].label;
  }
}

TEST(GenerateSynthetic, RejectsBadSpecs) {
  EXPECT_THROW(generate_synthetic(SyntheticSpec{{}, 0}), ConfigError);
  EXPECT_THROW(generate_synthetic(SyntheticSpec{{{"a", 0, 3, 1}}, 0}), ConfigError);
  EXPECT_THROW(generate_synthetic(SyntheticSpec{{{"a", 3, 3, 1}, {"b", 3, 4, 1}}, 0}),
               ConfigError);
}

TEST_F(TempDir, LoadsFourRowCsv) {
  const fs::path p = write("four.csv",
                           "group,x,y\n"
                           "f,1,2\n"
                           "f,3,4\n"
                           "m,5,6\n"
                           "m,7,8.5\n");
  const GroupedMatrix x = load_grouped_csv(p, "group");
  ASSERT_EQ(x.num_groups(), 2u);
  EXPECT_EQ(x.group(0).rows.size(), 2u);
  EXPECT_EQ(x.group(1).rows.size(), 2u);
  EXPECT_EQ(x.cols(), 2);
  EXPECT_EQ(x.matrix()(3, 1), 8.5);
}

TEST_F(TempDir, HeartSchemaGroupSizes) {
  std::string text = "age,sex,cp,trestbps,chol,fbs,restecg,thalach,exang,oldpeak,slope,ca,thal,target\n";
  std::mt19937_64 eng(1);
  std::uniform_int_distribution<int> d(1, 9);
  for (int i = 0; i < 297; ++i) {
    text += std::to_string(40 + d(eng)) + (i % 3 == 2 && i < 288 ? ",0" : ",1");
    for (int c = 0; c < 11; ++c) text += "," + std::to_string(d(eng));
    text += "," + std::to_string(i % 2) + "\n";
  }
  const GroupedMatrix x = load_grouped_csv(write("heart.csv", text), "sex", {"target"});
  ASSERT_EQ(x.num_groups(), 2u);
  EXPECT_EQ(x.group(0).label, "1");
  EXPECT_EQ(x.group(0).rows.size(), 201u);
  EXPECT_EQ(x.group(1).rows.size(), 96u);
  EXPECT_EQ(x.cols(), 12);
}

TEST_F(TempDir, QuotedFieldsAndCrlf) {
  const fs::path p = write("q.csv", "\"grp\",\"a,b\",c\r\n\"x, y\",1,2\r\nz,3,4\r\n");
  const GroupedMatrix x = load_grouped_csv(p, "grp");
  EXPECT_EQ(x.group(0).label, "x, y");
  EXPECT_EQ(x.matrix()(1, 0), 3.0);
}

TEST_F(TempDir, NegativeValueNamesCell) {
  const fs::path p = write("neg.csv", "group,a,b\ng,1,2\ng,-1,3\n");
  try {
    load_grouped_csv(p, "group");
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find(":3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'a'"), std::string::npos) << msg;
  }
}

TEST_F(TempDir, IngestionErrors) {
  EXPECT_THROW(load_grouped_csv(write("miss.csv", "group,a\ng,\n"), "group"), IngestionError);
  EXPECT_THROW(load_grouped_csv(write("nan.csv", "group,a\ng,abc\n"), "group"),
               IngestionError);
  EXPECT_THROW(load_grouped_csv(write("inf.csv", "group,a\ng,inf\n"), "group"),
               IngestionError);
  EXPECT_THROW(load_grouped_csv(write("ragged.csv", "group,a\ng,1,2\n"), "group"),
               IngestionError);
  EXPECT_THROW(load_grouped_csv(write("empty.csv", "group,a\n"), "group"), IngestionError);
  EXPECT_THROW(load_grouped_csv(dir_ / "absent.csv", "group"), IngestionError);
}

TEST_F(TempDir, UnknownColumnsAreConfigErrors) {
  const fs::path p = write("ok.csv", "group,a\ng,1\n");
  EXPECT_THROW(load_grouped_csv(p, "sex"), ConfigError);
  EXPECT_THROW(load_grouped_csv(p, "group", {"target"}), ConfigError);
}

TEST_F(TempDir, RoundTrip) {
  const GroupedMatrix x = normalize_features(
      generate_synthetic(SyntheticSpec{{{"a", 7, 5, 2}, {"b b", 4, 5, 3}}, 2}));
  const fs::path p = dir_ / "rt.csv";
  write_grouped_csv(x, p);
  const GroupedMatrix y = load_grouped_csv(p, "group");
  ASSERT_EQ(y.labels(), x.labels());
  EXPECT_LE((y.matrix() - x.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(y.matrix(), x.matrix());  // 17 digits round-trip exactly
}

TEST(NormalizeFeatures, HandValue) {
  Matrix m(2, 1);
  m << 3, 4;
  const GroupedMatrix x(m, {{"a", {0}}, {"b", {1}}});
  const GroupedMatrix y = normalize_features(x);
  EXPECT_NEAR(y.matrix()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(y.matrix()(1, 0), 0.8, 1e-15);
  EXPECT_NEAR(y.norm(0), 0.6, 1e-15);
  EXPECT_NEAR(y.norm(1), 0.8, 1e-15);
}

TEST(NormalizeFeatures, IdempotentAndColumnScaleInvariant) {
  const GroupedMatrix x = generate_synthetic(SyntheticSpec{{{"a", 9, 6, 2}, {"b", 5, 6, 3}}, 3});
  const GroupedMatrix once = normalize_features(x);
  for (Index c = 0; c < once.cols(); ++c) {
    EXPECT_NEAR(once.matrix().col(c).norm(), 1.0, 1e-14);
  }
  EXPECT_LE((normalize_features(once).matrix() - once.matrix()).cwiseAbs().maxCoeff(), 1e-12);
  Matrix scaled = x.matrix();
  scaled.col(2) *= 10.0;
  const GroupedMatrix s = normalize_features(GroupedMatrix(scaled, x.groups()));
  EXPECT_LE((s.matrix() - once.matrix()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NormalizeFeatures, ZeroColumn) {
  Matrix m = random_nonneg(4, 3, 1);
  m.col(1).setZero();
  EXPECT_THROW(normalize_features(GroupedMatrix(m, {{"a", {0, 1, 2, 3}}})),
               DegenerateGroupError);
}

}  // namespace
}  // namespace fairnmf
