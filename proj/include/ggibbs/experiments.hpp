#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ggibbs/json_io.hpp"

namespace ggibbs {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitResource = 3;

struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliOverrides {
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::vector<int> schedule;
};

const std::vector<std::string>& experiment_names();

// built-in defaults for a named experiment
Json default_config(const std::string& experiment);

// merge overrides, fill defaults, validate; throws SchemaError
Json resolve_config(Json config, const CliOverrides& overrides);

// run a resolved config; writes one JSON artifact (plus CSV twins and sample
// files where the experiment emits them) under out_dir
int run_experiment(const Json& resolved);

}  // namespace ggibbs
