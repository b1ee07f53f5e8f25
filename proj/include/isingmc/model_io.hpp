#pragma once

#include <string>
#include <string_view>

#include "isingmc/model.hpp"

namespace isingmc {

// Line-based UTF-8 model file, couplings and fields as hexadecimal float
// literals so round-trips are bit-exact:
//
//   ising-model v1
//   spins <n>
//   layers <L> <P>                         (only for layered models)
//   h <i> <hex-float>                      (one line per nonzero field)
//   edge <i> <j> <hex-float> <space|tau>   (i < j, each undirected edge once)
//
// Any other line is an error. Only identity-ordered models are serialized;
// reorderings are applied in process after loading.

std::string model_to_string(const SpinModel& model);

/// Parses a model document; errors carry the 1-based line number.
SpinModel model_from_string(std::string_view text);

void save_model(const SpinModel& model, const std::string& path);
SpinModel load_model(const std::string& path);

}  // namespace isingmc
