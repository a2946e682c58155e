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

#ifndef RELAXTAG_RELAX_H_
#define RELAXTAG_RELAX_H_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "relaxtag/constraints.h"
#include "relaxtag/corpus.h"
#include "relaxtag/model.h"

namespace relaxtag {

enum class SupportKind {
  kAdditive,       // s: Σ_r C_r Π p
  kProductOfSums,  // p: Π_cells Σ_r C_r Π p
  kProductOfMax,   // m: Π_cells max_r C_r Π p
  kSequence,       // q: B_ij (1 + T_ij)(1 + C_ij)
};

enum class UpdateKind {
  kSigned,       // c: p (1 + S) / Σ, S normalised into [-1, 1]
  kNonNegative,  // p: p S / Σ, S >= 0
  kSoftmax,      // e: exp(S / T) / Σ with a decreasing temperature
};

struct StopCriteria {
  int max_iters = 500;
  double epsilon = 1e-3;  // on max |Δp|
};

struct AlgorithmSpec {
  SupportKind support = SupportKind::kAdditive;
  UpdateKind update = UpdateKind::kNonNegative;
  Measure measure = Measure::kMutualInformation;
  Confiner confiner = Confiner::kLogistic;
  Selection selection;

  bool include_target_weight = true;
  StopCriteria stop;
  double temperature = 1.0;  // softmax T0
  double decay = 0.9;        // T_m = T0 decay^(m-1)
  bool sample = false;       // softmax draws one tag per row
};

// Decodes S[spmq]A[cpe]V[pikh](F[lsthn])?[BTCK]+. F is required unless the
// values are probabilities, where it must be absent. The linear confiner is
// linear01 under Ap and linear11 otherwise. Throws ConfigError for
// malformed names and for nonsense combinations: Ap with arctan or tanh, K
// together with B or T, Sq without B or K.
AlgorithmSpec ParseAlgorithmName(std::string_view name);

// Inverse of ParseAlgorithmName, with selection letters in B T K C order.
std::string AlgorithmName(const AlgorithmSpec &spec);

// Weights p^i_j of one sequence, stored row by row.
class LabellingState {
 public:
  LabellingState() = default;
  explicit LabellingState(const Candidates &candidates);

  std::size_t num_positions() const { return row_offset_.size() - 1; }
  std::size_t num_slots(std::size_t position) const {
    return row_offset_[position + 1] - row_offset_[position];
  }
  std::span<double> row(std::size_t position) {
    return {weights_.data() + row_offset_[position], num_slots(position)};
  }
  std::span<const double> row(std::size_t position) const {
    return {weights_.data() + row_offset_[position], num_slots(position)};
  }
  double weight(std::size_t position, std::size_t slot) const {
    return weights_[row_offset_[position] + slot];
  }
  const std::vector<double> &weights() const { return weights_; }
  std::vector<double> &weights() { return weights_; }

  bool operator==(const LabellingState &) const = default;

 private:
  std::vector<std::uint32_t> row_offset_{0};
  std::vector<double> weights_;
};

enum class InitMode { kLexical, kWinner, kUniform };

// kLexical: P(t | w) renormalised over the candidates. kWinner: 1 - epsilon
// on the most probable candidate and epsilon shared by the rest.
LabellingState InitState(const WordSequence &sequence,
                         const Candidates &candidates, const StatModel &model,
                         InitMode mode, double winner_epsilon = 0.1);

// log B_ij for every target, row-major: the log sequence probability of the
// current argmax tagging with candidate j substituted at position i.
std::vector<double> SequenceLogSupport(const WordSequence &sequence,
                                       const Candidates &candidates,
                                       const StatModel &model,
                                       const LabellingState &state);

// Support of every target, row-major. Under kSequence `model` must be set
// and the B factor of each row is scaled so that its largest entry is 1;
// both the signed and the non-negative update are invariant to that.
std::vector<double> ComputeSupport(const LabellingState &state,
                                   const ConstraintBundle &bundle,
                                   SupportKind kind, bool include_target_weight,
                                   const WordSequence *sequence = nullptr,
                                   const Candidates *candidates = nullptr,
                                   const StatModel *model = nullptr);

// Under kSigned divides the row by max |S| (all-zero rows stay). Under
// kNonNegative throws ConfigError naming (position, slot) for S < 0.
void NormalizeSupportRow(std::span<double> row, UpdateKind update,
                         std::size_t position = 0);

// Synchronous update of every row from `support`. Rows whose denominator
// vanishes keep their weights and are counted in the return value.
int UpdateWeights(LabellingState &state, const std::vector<double> &support,
                  UpdateKind update, double temperature = 1.0,
                  std::mt19937_64 *sampler = nullptr);

struct RunResult {
  LabellingState state;
  std::vector<LabellingState> snapshots;  // [0] initial, [m] after iteration m
  int iterations = 0;
  bool converged = false;
  int degeneracies = 0;
};

// Drives support → normalise → update until max |Δp| < epsilon or the
// iteration cap. Holds references to its inputs; immutable and safe to
// share across threads.
class RelaxationLabeller {
 public:
  // `ngrams` must outlive the labeller and be built from `model` with the
  // spec's measure and confiner. `hand` patterns must carry compatibilities.
  RelaxationLabeller(AlgorithmSpec spec, const StatModel &model,
                     const NgramCompatibility *ngrams,
                     const std::vector<ConstraintPattern> *hand);

  ConstraintBundle Bundle(const WordSequence &sequence,
                          const Candidates &candidates) const;

  RunResult Run(const WordSequence &sequence, const Candidates &candidates,
                InitMode init, bool keep_snapshots,
                std::mt19937_64 *sampler = nullptr) const;

  const AlgorithmSpec &spec() const { return spec_; }

 private:
  AlgorithmSpec spec_;
  const StatModel &model_;
  const NgramCompatibility *ngrams_;
  const std::vector<ConstraintPattern> *hand_;
};

// Per position, the candidate with the largest weight; ties go to the
// earlier tag.
std::vector<TagId> Decode(const LabellingState &state,
                          const Candidates &candidates);

}  // namespace relaxtag

#endif  // RELAXTAG_RELAX_H_
