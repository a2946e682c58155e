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

#include "relaxtag/relax.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "relaxtag/error.h"

namespace relaxtag {
namespace {

[[noreturn]] void BadName(std::string_view name, const std::string &why) {
  throw ConfigError(fmt::format("bad algorithm name '{}': {}", name, why));
}

bool Signed(Confiner confiner) {
  return confiner == Confiner::kLinear11 || confiner == Confiner::kArctan ||
         confiner == Confiner::kTanh;
}

}  // namespace

AlgorithmSpec ParseAlgorithmName(std::string_view name) {
  AlgorithmSpec spec;
  std::size_t pos = 0;
  auto letter = [&](char prefix, std::string_view allowed) {
    if (pos + 1 >= name.size() || name[pos] != prefix) {
      BadName(name, fmt::format("expected '{}' at offset {}", prefix, pos));
    }
    const char c = name[pos + 1];
    if (allowed.find(c) == std::string_view::npos) {
      BadName(name, fmt::format("'{}{}' is not one of {}", prefix, c, allowed));
    }
    pos += 2;
    return c;
  };

  switch (letter('S', "spmq")) {
    case 's': spec.support = SupportKind::kAdditive; break;
    case 'p': spec.support = SupportKind::kProductOfSums; break;
    case 'm': spec.support = SupportKind::kProductOfMax; break;
    default: spec.support = SupportKind::kSequence; break;
  }
  switch (letter('A', "cpe")) {
    case 'c': spec.update = UpdateKind::kSigned; break;
    case 'p': spec.update = UpdateKind::kNonNegative; break;
    default: spec.update = UpdateKind::kSoftmax; break;
  }
  switch (letter('V', "pikh")) {
    case 'p': spec.measure = Measure::kProbability; break;
    case 'i': spec.measure = Measure::kMutualInformation; break;
    case 'k': spec.measure = Measure::kAssociationRatio; break;
    default: spec.measure = Measure::kRelativeEntropy; break;
  }
  const bool has_f = pos < name.size() && name[pos] == 'F';
  if (spec.measure == Measure::kProbability) {
    if (has_f) BadName(name, "probabilities take no confining function");
    spec.confiner = Confiner::kNone;
  } else {
    if (!has_f) BadName(name, "a confining function F[lsthn] is required");
    switch (letter('F', "lsthn")) {
      case 'l':
        spec.confiner = spec.update == UpdateKind::kNonNegative
                            ? Confiner::kLinear01
                            : Confiner::kLinear11;
        break;
      case 's': spec.confiner = Confiner::kLogistic; break;
      case 't': spec.confiner = Confiner::kArctan; break;
      case 'h': spec.confiner = Confiner::kTanh; break;
      default: spec.confiner = Confiner::kNone; break;
    }
  }
  if (pos == name.size()) BadName(name, "no constraint set B, T, C or K");
  for (; pos < name.size(); ++pos) {
    bool *flag = nullptr;
    switch (name[pos]) {
      case 'B': flag = &spec.selection.bigrams; break;
      case 'T': flag = &spec.selection.trigrams; break;
      case 'C': flag = &spec.selection.hand; break;
      case 'K': flag = &spec.selection.backoff; break;
      default:
        BadName(name, fmt::format("unknown constraint set '{}'", name[pos]));
    }
    if (*flag) BadName(name, fmt::format("constraint set '{}' repeated", name[pos]));
    *flag = true;
  }

  if (spec.update == UpdateKind::kNonNegative && Signed(spec.confiner)) {
    BadName(name, "Ap needs non-negative values but the confiner is signed");
  }
  if (spec.selection.backoff &&
      (spec.selection.bigrams || spec.selection.trigrams)) {
    BadName(name, "K is only allowed with C");
  }
  if (spec.support == SupportKind::kSequence && !spec.selection.bigrams &&
      !spec.selection.backoff) {
    BadName(name, "Sq needs bigrams (B or K)");
  }
  return spec;
}

std::string AlgorithmName(const AlgorithmSpec &spec) {
  std::string out = "S";
  out += "spmq"[static_cast<int>(spec.support)];
  out += 'A';
  out += "cpe"[static_cast<int>(spec.update)];
  out += 'V';
  out += "pikh"[static_cast<int>(spec.measure)];
  if (spec.measure != Measure::kProbability) {
    out += 'F';
    switch (spec.confiner) {
      case Confiner::kLinear01:
      case Confiner::kLinear11: out += 'l'; break;
      case Confiner::kLogistic: out += 's'; break;
      case Confiner::kArctan: out += 't'; break;
      case Confiner::kTanh: out += 'h'; break;
      case Confiner::kNone: out += 'n'; break;
    }
  }
  if (spec.selection.bigrams) out += 'B';
  if (spec.selection.trigrams) out += 'T';
  if (spec.selection.backoff) out += 'K';
  if (spec.selection.hand) out += 'C';
  return out;
}

LabellingState::LabellingState(const Candidates &candidates) {
  for (const std::vector<TagId> &row : candidates) {
    row_offset_.push_back(row_offset_.back() +
                          static_cast<std::uint32_t>(row.size()));
  }
  weights_.assign(row_offset_.back(), 0.0);
}

LabellingState InitState(const WordSequence &sequence,
                         const Candidates &candidates, const StatModel &model,
                         InitMode mode, double winner_epsilon) {
  LabellingState state(candidates);
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::span<double> row = state.row(i);
    const std::size_t m = row.size();
    if (m == 0) throw DataError(fmt::format("position {} has no candidates", i));
    if (mode == InitMode::kUniform) {
      std::fill(row.begin(), row.end(), 1.0 / m);
      continue;
    }
    double total = 0.0;
    for (std::size_t s = 0; s < m; ++s) {
      row[s] = model.Lexical(sequence.tokens[i].surface, candidates[i][s]);
      total += row[s];
    }
    if (mode == InitMode::kLexical) {
      for (double &w : row) w /= total;
      continue;
    }
    const std::size_t best = std::max_element(row.begin(), row.end()) - row.begin();
    for (std::size_t s = 0; s < m; ++s) {
      row[s] = m == 1 ? 1.0
                      : (s == best ? 1.0 - winner_epsilon
                                   : winner_epsilon / static_cast<double>(m - 1));
    }
  }
  return state;
}

std::vector<double> SequenceLogSupport(const WordSequence &sequence,
                                       const Candidates &candidates,
                                       const StatModel &model,
                                       const LabellingState &state) {
  const std::size_t n = sequence.size();
  const std::vector<TagId> current = Decode(state, candidates);
  const auto lex = [&](std::size_t k, TagId t) {
    return std::log(model.Lexical(sequence.tokens[k].surface, t));
  };
  const auto trans = [&](TagId a, TagId b) {
    return std::log(model.Transition(a, b));
  };

  double base = std::log(model.Start(current[0]));
  for (std::size_t k = 0; k < n; ++k) {
    base += lex(k, current[k]);
    if (k + 1 < n) base += trans(current[k], current[k + 1]);
  }

  std::vector<double> out;
  out.reserve(state.weights().size());
  for (std::size_t i = 0; i < n; ++i) {
    double without = base - lex(i, current[i]);
    if (i == 0) without -= std::log(model.Start(current[0]));
    if (i > 0) without -= trans(current[i - 1], current[i]);
    if (i + 1 < n) without -= trans(current[i], current[i + 1]);
    for (TagId j : candidates[i]) {
      double score = without + lex(i, j);
      if (i == 0) score += std::log(model.Start(j));
      if (i > 0) score += trans(current[i - 1], j);
      if (i + 1 < n) score += trans(j, current[i + 1]);
      out.push_back(score);
    }
  }
  return out;
}

std::vector<double> ComputeSupport(const LabellingState &state,
                                   const ConstraintBundle &bundle,
                                   SupportKind kind, bool include_target_weight,
                                   const WordSequence *sequence,
                                   const Candidates *candidates,
                                   const StatModel *model) {
  const std::vector<double> &w = state.weights();
  if (bundle.num_targets() != w.size()) {
    throw Error("constraint bundle does not match the labelling state");
  }
  const auto term = [&](const InstantiatedConstraint &c, double target) {
    double v = c.compatibility * target;
    for (const WeightRef &f : bundle.factors(c)) v *= state.weight(f.position, f.slot);
    return v;
  };

  std::vector<double> support(w.size(), 0.0);
  std::vector<double> log_b;
  if (kind == SupportKind::kSequence) {
    if (sequence == nullptr || candidates == nullptr || model == nullptr) {
      throw Error("sequence support needs the sequence, candidates and model");
    }
    log_b = SequenceLogSupport(*sequence, *candidates, *model, state);
  }

  for (std::size_t t = 0; t < w.size(); ++t) {
    const double target = include_target_weight ? w[t] : 1.0;
    const auto constraints = bundle.constraints(t);
    switch (kind) {
      case SupportKind::kAdditive: {
        double s = 0.0;
        for (const InstantiatedConstraint &c : constraints) s += term(c, target);
        support[t] = s;
        break;
      }
      case SupportKind::kProductOfSums:
      case SupportKind::kProductOfMax: {
        const bool use_max = kind == SupportKind::kProductOfMax;
        double cell[kNumCells];
        bool used[kNumCells] = {};
        for (const InstantiatedConstraint &c : constraints) {
          const double v = term(c, target);
          if (!used[c.cell]) {
            cell[c.cell] = v;
            used[c.cell] = true;
          } else {
            cell[c.cell] = use_max ? std::max(cell[c.cell], v) : cell[c.cell] + v;
          }
        }
        double s = 1.0;
        for (int k = 0; k < kNumCells; ++k) {
          if (used[k]) s *= cell[k];
        }
        support[t] = s;
        break;
      }
      case SupportKind::kSequence: {
        double tri = 0.0, hand = 0.0;
        for (const InstantiatedConstraint &c : constraints) {
          const DegreeClass dc = ClassOf(c.cell);
          if (dc == DegreeClass::kTernary) tri += term(c, target);
          if (dc == DegreeClass::kHand) hand += term(c, target);
        }
        support[t] = (1.0 + tri) * (1.0 + hand);
        break;
      }
    }
  }

  if (kind == SupportKind::kSequence) {
    for (std::size_t i = 0; i < state.num_positions(); ++i) {
      const std::size_t begin = bundle.target(i, 0);
      const std::size_t end = begin + state.num_slots(i);
      const double top = *std::max_element(log_b.begin() + begin, log_b.begin() + end);
      for (std::size_t t = begin; t < end; ++t) {
        support[t] *= std::exp(log_b[t] - top);
      }
    }
  }
  return support;
}

void NormalizeSupportRow(std::span<double> row, UpdateKind update,
                         std::size_t position) {
  for (std::size_t s = 0; s < row.size(); ++s) {
    if (!std::isfinite(row[s])) {
      throw DataError(fmt::format("non-finite support at ({}, {})", position, s));
    }
  }
  if (update == UpdateKind::kSigned) {
    double top = 0.0;
    for (double v : row) top = std::max(top, std::abs(v));
    if (top > 0.0) {
      for (double &v : row) v /= top;
    }
  } else if (update == UpdateKind::kNonNegative) {
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] < 0.0) {
        throw ConfigError(fmt::format(
            "negative support {} at ({}, {}) under the non-negative update",
            row[s], position, s));
      }
    }
  }
}

int UpdateWeights(LabellingState &state, const std::vector<double> &support,
                  UpdateKind update, double temperature,
                  std::mt19937_64 *sampler) {
  if (support.size() != state.weights().size()) {
    throw Error("support does not match the labelling state");
  }
  int degenerate = 0;
  std::size_t offset = 0;
  std::vector<double> next;
  for (std::size_t i = 0; i < state.num_positions(); ++i) {
    std::span<double> row = state.row(i);
    const double *s = support.data() + offset;
    offset += row.size();
    next.assign(row.size(), 0.0);

    if (update == UpdateKind::kSoftmax) {
      const double top = *std::max_element(s, s + row.size());
      double total = 0.0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        next[k] = std::exp((s[k] - top) / temperature);
        total += next[k];
      }
      for (double &v : next) v /= total;
      if (sampler != nullptr) {
        std::discrete_distribution<std::size_t> pick(next.begin(), next.end());
        const std::size_t chosen = pick(*sampler);
        std::fill(next.begin(), next.end(), 0.0);
        next[chosen] = 1.0;
      }
      std::copy(next.begin(), next.end(), row.begin());
      continue;
    }

    // A factor shared by the whole row changes nothing once renormalised.
    const auto factor = [&](std::size_t k) {
      return update == UpdateKind::kSigned ? 1.0 + s[k] : s[k];
    };
    bool uniform = true;
    double total = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      next[k] = row[k] * factor(k);
      total += next[k];
      if (factor(k) != factor(0)) uniform = false;
    }
    if (!(total > 0.0)) {
      ++degenerate;
      continue;
    }
    if (uniform) continue;
    for (std::size_t k = 0; k < row.size(); ++k) row[k] = next[k] / total;
  }
  return degenerate;
}

RelaxationLabeller::RelaxationLabeller(AlgorithmSpec spec,
                                       const StatModel &model,
                                       const NgramCompatibility *ngrams,
                                       const std::vector<ConstraintPattern> *hand)
    : spec_(std::move(spec)), model_(model), ngrams_(ngrams), hand_(hand) {
  if (spec_.selection.hand && hand_ == nullptr) {
    throw ConfigError("constraint set C selected without hand-written constraints");
  }
  if (spec_.support == SupportKind::kSequence && !spec_.selection.bigrams &&
      !spec_.selection.backoff) {
    throw ConfigError("sequence support needs bigrams (B or K)");
  }
  if (spec_.update == UpdateKind::kSoftmax &&
      !(spec_.temperature > 0.0 && spec_.decay > 0.0 && spec_.decay <= 1.0)) {
    throw ConfigError("softmax needs temperature > 0 and decay in (0, 1]");
  }
  if (spec_.stop.max_iters < 1 || !(spec_.stop.epsilon >= 0.0)) {
    throw ConfigError("stop criteria need max_iters >= 1 and epsilon >= 0");
  }
}

ConstraintBundle RelaxationLabeller::Bundle(const WordSequence &sequence,
                                            const Candidates &candidates) const {
  static const std::vector<ConstraintPattern> kNone;
  return InstantiateBundle(sequence, candidates, ngrams_,
                           hand_ != nullptr ? *hand_ : kNone, spec_.selection);
}

RunResult RelaxationLabeller::Run(const WordSequence &sequence,
                                  const Candidates &candidates, InitMode init,
                                  bool keep_snapshots,
                                  std::mt19937_64 *sampler) const {
  if (sequence.size() == 0) throw DataError("cannot tag an empty sequence");
  if (spec_.sample && sampler == nullptr) {
    throw ConfigError("softmax sampling needs a seeded generator");
  }
  const ConstraintBundle bundle = Bundle(sequence, candidates);
  RunResult result;
  result.state = InitState(sequence, candidates, model_, init);
  if (keep_snapshots) result.snapshots.push_back(result.state);

  double temperature = spec_.temperature;
  for (int m = 1; m <= spec_.stop.max_iters; ++m) {
    std::vector<double> support =
        ComputeSupport(result.state, bundle, spec_.support,
                       spec_.include_target_weight, &sequence, &candidates, &model_);
    std::size_t offset = 0;
    for (std::size_t i = 0; i < result.state.num_positions(); ++i) {
      const std::size_t len = result.state.num_slots(i);
      NormalizeSupportRow(std::span<double>(support.data() + offset, len),
                          spec_.update, i);
      offset += len;
    }
    const std::vector<double> before = result.state.weights();
    result.degeneracies +=
        UpdateWeights(result.state, support, spec_.update, temperature,
                      spec_.sample ? sampler : nullptr);
    temperature *= spec_.decay;

    double delta = 0.0;
    for (std::size_t k = 0; k < before.size(); ++k) {
      delta = std::max(delta, std::abs(result.state.weights()[k] - before[k]));
    }
    result.iterations = m;
    if (keep_snapshots) result.snapshots.push_back(result.state);
    if (delta < spec_.stop.epsilon) {
      result.converged = true;
      break;
    }
  }
  return result;
}

std::vector<TagId> Decode(const LabellingState &state,
                          const Candidates &candidates) {
  std::vector<TagId> out;
  out.reserve(state.num_positions());
  for (std::size_t i = 0; i < state.num_positions(); ++i) {
    std::span<const double> row = state.row(i);
    std::size_t best = 0;
    for (std::size_t s = 1; s < row.size(); ++s) {
      if (row[s] > row[best]) best = s;
    }
    out.push_back(candidates[i][best]);
  }
  return out;
}

}  // namespace relaxtag
