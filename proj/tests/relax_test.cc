// Copyright 2026 The relaxtag Authors.
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

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "oracles.h"
#include "relaxtag/error.h"
#include "relaxtag/relax.h"
#include "synthetic.h"

namespace relaxtag {
namespace {

TEST(AlgorithmNameTest, Decodes) {
  const AlgorithmSpec a = ParseAlgorithmName("SsApViFsB");
  EXPECT_EQ(a.support, SupportKind::kAdditive);
  EXPECT_EQ(a.update, UpdateKind::kNonNegative);
  EXPECT_EQ(a.measure, Measure::kMutualInformation);
  EXPECT_EQ(a.confiner, Confiner::kLogistic);
  EXPECT_EQ(a.selection, (Selection{true, false, false, false}));

  const AlgorithmSpec q = ParseAlgorithmName("SqApVkFnB");
  EXPECT_EQ(q.support, SupportKind::kSequence);
  EXPECT_EQ(q.measure, Measure::kAssociationRatio);
  EXPECT_EQ(q.confiner, Confiner::kNone);

  const AlgorithmSpec m = ParseAlgorithmName("SmAcViFsKC");
  EXPECT_EQ(m.support, SupportKind::kProductOfMax);
  EXPECT_EQ(m.update, UpdateKind::kSigned);
  EXPECT_EQ(m.selection, (Selection{false, false, true, true}));

  EXPECT_EQ(ParseAlgorithmName("SpApViFlB").confiner, Confiner::kLinear01);
  EXPECT_EQ(ParseAlgorithmName("SpAcViFlB").confiner, Confiner::kLinear11);
  EXPECT_EQ(ParseAlgorithmName("SsApVpB").confiner, Confiner::kNone);
  EXPECT_EQ(ParseAlgorithmName("SsAeVhFtT").update, UpdateKind::kSoftmax);
}

TEST(AlgorithmNameTest, Rejects) {
  for (const char *bad : {"", "SsApViFtB", "SsApViFhB", "SsApVi", "SsApViFsKB",
                          "SsApViFsKT", "SqApViFsT", "SqApViFsC", "SsApVpFsB",
                          "SsApViB", "SxApViFsB", "SsApViFsBB", "SsApViFsX",
                          "ApSsViFsB", "S"}) {
    EXPECT_THROW(ParseAlgorithmName(bad), ConfigError) << bad;
  }
}

TEST(AlgorithmNameTest, RoundTripsEveryValidName) {
  int valid = 0;
  for (char s : std::string("spmq")) {
    for (char a : std::string("cpe")) {
      for (char v : std::string("pikh")) {
        for (std::string f : {"", "Fl", "Fs", "Ft", "Fh", "Fn"}) {
          for (std::string sel : {"B", "T", "C", "K", "BT", "BC", "TC", "KC", "BTC"}) {
            const std::string name = std::string("S") + s + "A" + a + "V" + v + f + sel;
            try {
              EXPECT_EQ(AlgorithmName(ParseAlgorithmName(name)), name);
              ++valid;
            } catch (const ConfigError &) {
            }
          }
        }
      }
    }
  }
  EXPECT_GT(valid, 500);
}

class SmallModelTest : public ::testing::Test {
 protected:
  void SetUp() override {
    ts_ = TagSet({"X", "Y", "Z"}, {"X", "Y"}, {});
    corpus_ = ParseTaggedCorpus(
        "a\tX\nb\tY\na\tX\nb\tY\nc\tZ\n\nb\tX\nb\tX\nb\tX\nb\tY\na\tY\nc\tZ\n"
        "a\tX\nb\tY\n",
        ts_);
    model_ = EstimateModel(corpus_, BuildLexicon(corpus_), ts_);
  }
  WordSequence Words(std::initializer_list<const char *> surfaces) const {
    WordSequence s;
    for (const char *w : surfaces) s.tokens.push_back(Token{w, std::nullopt});
    return s;
  }
  Candidates Cands(const WordSequence &s) const {
    return CandidatesFor(s, model_.lexicon(), ts_);
  }
  TagSet ts_;
  Corpus corpus_;
  StatModel model_;
};

TEST_F(SmallModelTest, InitModes) {
  const WordSequence s = Words({"a", "c", "new"});
  const Candidates c = Cands(s);
  const LabellingState lex = InitState(s, c, model_, InitMode::kLexical);
  EXPECT_NEAR(lex.weight(0, 0), 0.75, 1e-12);
  EXPECT_NEAR(lex.weight(0, 1), 0.25, 1e-12);
  EXPECT_DOUBLE_EQ(lex.weight(1, 0), 1.0);
  EXPECT_DOUBLE_EQ(lex.weight(2, 0), 0.5);
  const LabellingState uni = InitState(s, c, model_, InitMode::kUniform);
  EXPECT_DOUBLE_EQ(uni.weight(0, 1), 0.5);
  const LabellingState win = InitState(s, c, model_, InitMode::kWinner, 0.2);
  EXPECT_DOUBLE_EQ(win.weight(0, 0), 0.8);
  EXPECT_DOUBLE_EQ(win.weight(0, 1), 0.2);
  EXPECT_DOUBLE_EQ(win.weight(1, 0), 1.0);
}

TEST(ComputeSupportTest, SingleBinaryConstraint) {
  const Candidates c = {{MakeTag(0), MakeTag(1)}, {MakeTag(0)}};
  BundleBuilder b(c);
  const WeightRef f[] = {{0, 0}};
  b.NextTarget();
  b.NextTarget();
  b.Add(kCellBigramLeft, 0.5, f);
  b.NextTarget();
  const ConstraintBundle bundle = std::move(b).Build();
  LabellingState state(c);
  state.row(0)[0] = 0.8;
  state.row(0)[1] = 0.2;
  state.row(1)[0] = 1.0;
  const auto s = ComputeSupport(state, bundle, SupportKind::kAdditive, false);
  EXPECT_DOUBLE_EQ(s[2], 0.4);
  EXPECT_DOUBLE_EQ(s[0], 0.0);
  const auto p = ComputeSupport(state, bundle, SupportKind::kProductOfSums, false);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  EXPECT_DOUBLE_EQ(p[2], 0.4);
}

TEST(ComputeSupportTest, AdditiveMatchesNaiveSum) {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 200; ++trial) {
    const testing::BundleCase bc = testing::RandomBundleCase(50, rng);
    for (bool include : {true, false}) {
      const auto got = ComputeSupport(bc.state, bc.bundle, SupportKind::kAdditive, include);
      const auto want = testing::NaiveAdditiveSupport(bc.raw, bc.candidates,
                                                      bc.state.weights(), include);
      ASSERT_EQ(got.size(), want.size());
      for (std::size_t t = 0; t < got.size(); ++t) EXPECT_NEAR(got[t], want[t], 1e-12);
    }
  }
}

TEST(ComputeSupportTest, ProductFormsMultiplyCells) {
  std::mt19937_64 rng(103);
  for (int trial = 0; trial < 100; ++trial) {
    const testing::BundleCase bc = testing::RandomBundleCase(30, rng);
    const auto sums = ComputeSupport(bc.state, bc.bundle, SupportKind::kProductOfSums, true);
    const auto maxes = ComputeSupport(bc.state, bc.bundle, SupportKind::kProductOfMax, true);
    for (std::size_t t = 0; t < bc.bundle.num_targets(); ++t) {
      std::map<Cell, std::vector<double>> cells;
      for (const auto &c : bc.bundle.constraints(t)) {
        double v = c.compatibility * bc.state.weights()[t];
        for (const WeightRef &f : bc.bundle.factors(c)) v *= bc.state.weight(f.position, f.slot);
        cells[c.cell].push_back(v);
      }
      double want_sum = 1.0, want_max = 1.0;
      for (const auto &[cell, values] : cells) {
        want_sum *= std::accumulate(values.begin(), values.end(), 0.0);
        want_max *= *std::max_element(values.begin(), values.end());
      }
      EXPECT_NEAR(sums[t], want_sum, 1e-12);
      EXPECT_NEAR(maxes[t], want_max, 1e-12);
    }
  }
}

TEST_F(SmallModelTest, SequenceSupportMatchesDirectProduct) {
  const WordSequence s = Words({"a", "b", "new", "b", "c", "a"});
  const Candidates c = Cands(s);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    LabellingState state(c);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    for (double &x : state.weights()) x = w(rng);
    const auto log_b = SequenceLogSupport(s, c, model_, state);
    const std::vector<TagId> current = Decode(state, c);
    std::size_t t = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (TagId j : c[i]) {
        std::vector<TagId> tags = current;
        tags[i] = j;
        const double direct = testing::DirectSequenceProbability(s, tags, model_);
        EXPECT_NEAR(std::exp(log_b[t]) / direct, 1.0, 1e-9);
        ++t;
      }
    }
  }
}

TEST_F(SmallModelTest, SequenceSupportWithoutExtrasIsScaledB) {
  const WordSequence s = Words({"a", "b", "a"});
  const Candidates c = Cands(s);
  const NgramCompatibility ng(model_, Measure::kMutualInformation, Confiner::kLogistic);
  Selection sel;
  sel.bigrams = true;
  const ConstraintBundle bundle = InstantiateBundle(s, c, &ng, {}, sel);
  const LabellingState state = InitState(s, c, model_, InitMode::kLexical);
  const auto support =
      ComputeSupport(state, bundle, SupportKind::kSequence, true, &s, &c, &model_);
  const auto log_b = SequenceLogSupport(s, c, model_, state);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::size_t begin = bundle.target(i, 0);
    const double top = *std::max_element(log_b.begin() + begin,
                                         log_b.begin() + begin + c[i].size());
    for (std::size_t k = 0; k < c[i].size(); ++k) {
      EXPECT_NEAR(support[begin + k], std::exp(log_b[begin + k] - top), 1e-15);
    }
  }
  EXPECT_THROW(ComputeSupport(state, bundle, SupportKind::kSequence, true), Error);
}

TEST(NormalizeSupportRowTest, Cases) {
  std::vector<double> row = {2.0, -4.0};
  NormalizeSupportRow(row, UpdateKind::kSigned);
  EXPECT_EQ(row, (std::vector<double>{0.5, -1.0}));
  std::vector<double> zero = {0.0, 0.0};
  NormalizeSupportRow(zero, UpdateKind::kSigned);
  EXPECT_EQ(zero, (std::vector<double>{0.0, 0.0}));
  std::vector<double> pass = {0.3, 0.1};
  NormalizeSupportRow(pass, UpdateKind::kNonNegative);
  EXPECT_EQ(pass, (std::vector<double>{0.3, 0.1}));
  std::vector<double> neg = {0.3, -0.1};
  try {
    NormalizeSupportRow(neg, UpdateKind::kNonNegative, 4);
    FAIL() << "negative support accepted";
  } catch (const ConfigError &e) {
    EXPECT_NE(std::string(e.what()).find("(4, 1)"), std::string::npos);
  }
  std::vector<double> nan = {std::nan("")};
  EXPECT_THROW(NormalizeSupportRow(nan, UpdateKind::kSigned), DataError);
}

LabellingState TwoByTwo(double a, double b) {
  LabellingState s(Candidates{{MakeTag(0), MakeTag(1)}});
  s.row(0)[0] = a;
  s.row(0)[1] = b;
  return s;
}

TEST(UpdateWeightsTest, Cases) {
  LabellingState s = TwoByTwo(0.5, 0.5);
  EXPECT_EQ(UpdateWeights(s, {2.0, 1.0}, UpdateKind::kNonNegative), 0);
  EXPECT_NEAR(s.weight(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(s.weight(0, 1), 1.0 / 3.0, 1e-15);

  LabellingState z = TwoByTwo(0.3, 0.7);
  const LabellingState before = z;
  EXPECT_EQ(UpdateWeights(z, {0.0, 0.0}, UpdateKind::kSigned), 0);
  EXPECT_EQ(z, before);
  EXPECT_EQ(UpdateWeights(z, {0.0, 0.0}, UpdateKind::kNonNegative), 1);
  EXPECT_EQ(z, before);
  EXPECT_EQ(UpdateWeights(z, {-1.0, -1.0}, UpdateKind::kSigned), 1);
  EXPECT_EQ(z, before);

  LabellingState e = TwoByTwo(0.9, 0.1);
  UpdateWeights(e, {0.4, 0.4}, UpdateKind::kSoftmax, 0.5);
  EXPECT_DOUBLE_EQ(e.weight(0, 0), 0.5);
  UpdateWeights(e, {0.4, 0.3}, UpdateKind::kSoftmax, 1e-4);
  EXPECT_GE(e.weight(0, 0), 1.0 - 1e-6);
}

TEST(UpdateWeightsTest, SamplingGivesOneHotRows) {
  std::mt19937_64 rng(3);
  int first = 0;
  for (int k = 0; k < 200; ++k) {
    LabellingState s = TwoByTwo(0.5, 0.5);
    UpdateWeights(s, {std::log(3.0), 0.0}, UpdateKind::kSoftmax, 1.0, &rng);
    EXPECT_EQ(s.weight(0, 0) + s.weight(0, 1), 1.0);
    first += s.weight(0, 0) == 1.0;
  }
  EXPECT_GT(first, 120);
  EXPECT_LT(first, 180);
}

TEST(UpdateWeightsTest, RowSumsMonotonicityAndAbsorption) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    testing::BundleCase bc = testing::RandomBundleCase(20, rng);
    bc.state.weights()[0] = 0.0;
    double total = 0.0;
    for (double w : bc.state.row(0)) total += w;
    if (total == 0.0) continue;
    for (double &w : bc.state.row(0)) w /= total;
    std::vector<double> support(bc.state.weights().size());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double &x : support) x = u(rng);
    const LabellingState before = bc.state;
    for (UpdateKind kind : {UpdateKind::kSigned, UpdateKind::kNonNegative}) {
      LabellingState s = before;
      UpdateWeights(s, support, kind);
      std::size_t t = 0;
      for (std::size_t i = 0; i < s.num_positions(); ++i) {
        double sum = 0.0;
        for (std::size_t k = 0; k < s.num_slots(i); ++k) {
          sum += s.weight(i, k);
          EXPECT_GE(s.weight(i, k), 0.0);
          EXPECT_LE(s.weight(i, k), 1.0);
          for (std::size_t l = 0; l < s.num_slots(i); ++l) {
            if (before.weight(i, k) == before.weight(i, l) && before.weight(i, k) > 0 &&
                support[t + k] > support[t + l]) {
              EXPECT_GT(s.weight(i, k), s.weight(i, l));
            }
          }
        }
        EXPECT_NEAR(sum, 1.0, 1e-9);
        t += s.num_slots(i);
      }
      EXPECT_EQ(s.weights()[0], 0.0);
    }
  }
}

TEST(UpdateWeightsTest, ScalingCompatibilitiesKeepsTheUpdate) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    testing::BundleCase bc = testing::RandomBundleCase(30, rng);
    std::vector<double> support(bc.state.weights().size());
    std::uniform_real_distribution<double> u(0.01, 1.0);
    for (double &x : support) x = u(rng);
    std::vector<double> scaled = support;
    for (double &x : scaled) x *= 3.7;
    LabellingState a = bc.state, b = bc.state;
    UpdateWeights(a, support, UpdateKind::kNonNegative);
    UpdateWeights(b, scaled, UpdateKind::kNonNegative);
    EXPECT_EQ(Decode(a, bc.candidates), Decode(b, bc.candidates));
    for (std::size_t k = 0; k < a.weights().size(); ++k) {
      EXPECT_NEAR(a.weights()[k], b.weights()[k], 1e-12);
    }
  }
}

TEST(DecodeTest, ArgmaxWithEarliestTie) {
  const Candidates c = {{MakeTag(1), MakeTag(2)}, {MakeTag(0), MakeTag(3)}, {MakeTag(4)}};
  LabellingState s(c);
  s.row(0)[0] = 0.7;
  s.row(0)[1] = 0.3;
  s.row(1)[0] = 0.5;
  s.row(1)[1] = 0.5;
  s.row(2)[0] = 1.0;
  EXPECT_EQ(Decode(s, c), (std::vector<TagId>{MakeTag(1), MakeTag(0), MakeTag(4)}));
}

TEST_F(SmallModelTest, RunStops) {
  const NgramCompatibility ng(model_, Measure::kMutualInformation, Confiner::kLogistic);
  AlgorithmSpec spec = ParseAlgorithmName("SsApViFsB");

  const WordSequence plain = Words({"c", "c"});
  const RunResult unambiguous =
      RelaxationLabeller(spec, model_, &ng, nullptr)
          .Run(plain, Cands(plain), InitMode::kLexical, false);
  EXPECT_EQ(unambiguous.iterations, 1);
  EXPECT_TRUE(unambiguous.converged);
  EXPECT_EQ(Decode(unambiguous.state, Cands(plain)),
            (std::vector<TagId>{ts_.At("Z"), ts_.At("Z")}));

  const WordSequence s = Words({"a", "b", "a", "b"});
  spec.stop = {5, 0.0};
  const RunResult capped = RelaxationLabeller(spec, model_, &ng, nullptr)
                               .Run(s, Cands(s), InitMode::kLexical, true);
  EXPECT_EQ(capped.iterations, 5);
  EXPECT_FALSE(capped.converged);
  EXPECT_EQ(capped.snapshots.size(), 6u);
  EXPECT_EQ(capped.snapshots.back(), capped.state);

  spec.stop = {500, 1.0};
  const RunResult loose = RelaxationLabeller(spec, model_, &ng, nullptr)
                              .Run(s, Cands(s), InitMode::kLexical, false);
  EXPECT_EQ(loose.iterations, 1);
  EXPECT_TRUE(loose.converged);
}

TEST_F(SmallModelTest, RunIsDeterministicAndKeepsRowsNormalised) {
  const NgramCompatibility ng(model_, Measure::kMutualInformation, Confiner::kLinear11);
  for (const char *name : {"SsAcViFlB", "SpAcViFlBT", "SmAcViFlK", "SqAcViFlBT",
                           "SsAeViFlB"}) {
    const RelaxationLabeller labeller(ParseAlgorithmName(name), model_, &ng, nullptr);
    const WordSequence s = Words({"a", "b", "new", "b", "a", "c"});
    const RunResult r1 = labeller.Run(s, Cands(s), InitMode::kLexical, true);
    const RunResult r2 = labeller.Run(s, Cands(s), InitMode::kLexical, true);
    EXPECT_EQ(r1.snapshots, r2.snapshots) << name;
    for (const LabellingState &snap : r1.snapshots) {
      for (std::size_t i = 0; i < snap.num_positions(); ++i) {
        double sum = 0.0;
        for (double w : snap.row(i)) sum += w;
        EXPECT_NEAR(sum, 1.0, 1e-9) << name;
      }
    }
  }
}

TEST_F(SmallModelTest, LabellerValidatesItsConfiguration) {
  const NgramCompatibility ng(model_, Measure::kMutualInformation, Confiner::kLogistic);
  EXPECT_THROW(RelaxationLabeller(ParseAlgorithmName("SsApViFsC"), model_, &ng, nullptr),
               ConfigError);
  AlgorithmSpec softmax = ParseAlgorithmName("SsAeViFsB");
  softmax.decay = 0.0;
  EXPECT_THROW(RelaxationLabeller(softmax, model_, &ng, nullptr), ConfigError);
  softmax.decay = 0.9;
  softmax.sample = true;
  const RelaxationLabeller sampler(softmax, model_, &ng, nullptr);
  const WordSequence s = Words({"a", "b"});
  EXPECT_THROW(sampler.Run(s, Cands(s), InitMode::kLexical, false), ConfigError);
  std::mt19937_64 rng(1);
  EXPECT_NO_THROW(sampler.Run(s, Cands(s), InitMode::kLexical, false, &rng));
  EXPECT_THROW(sampler.Run(WordSequence{}, Candidates{}, InitMode::kLexical, false, &rng),
               DataError);
}

}  // namespace
}  // namespace relaxtag
