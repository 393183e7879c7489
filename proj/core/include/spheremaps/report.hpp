#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spheremaps/vectors.hpp"

namespace spheremaps {

enum class Verdict { Pass, Fail, HypothesisNotMet };

const char* to_string(Verdict v);

/// Per-block coordinate readouts of a checked map on a witness pair, in the
/// layout of the separation argument: alpha on the partition class P, beta on
/// its complement, gamma on the common tail. Entries are NaN when the block
/// meets no index of that class (possible for blocks of length 1).
struct BlockReadouts {
  std::vector<double> alpha_m, beta_m;
  std::vector<double> alpha_n, beta_n;
  double gamma_m = 0.0;
  double gamma_n = 0.0;
};

struct InequalityReport {
  std::string checker;
  std::map<std::string, std::string> inputs;
  std::vector<std::pair<std::string, double>> hypothesis_values;
  double conclusion_value = 0.0;
  double threshold = 0.0;
  /// Signed per the inequality direction: nonnegative means the conclusion
  /// holds with that much room.
  double margin = 0.0;
  Verdict verdict = Verdict::Fail;
  /// Name of the first failed hypothesis when verdict is HypothesisNotMet.
  std::string failed_hypothesis;
  std::optional<BlockReadouts> block_readouts;

  void add(std::string name, double value) {
    hypothesis_values.emplace_back(std::move(name), value);
  }
};

struct ModulusEstimate {
  std::string map_name;
  double t = 0.0;
  double lower_bound = 0.0;
  std::optional<std::pair<PcpVector, PcpVector>> witness_pair;
  std::int64_t pairs_tried = 0;
};

}  // namespace spheremaps
