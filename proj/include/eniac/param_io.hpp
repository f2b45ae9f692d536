#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eniac/function_class.hpp"

namespace eniac {

/// Flat parameter array with a small header naming the class kind and shape.
///
///   eniac-params 1
///   kind <kind>
///   shape <n0> <n1> ...
///   count <N>
///   <one value per line, round-trip precision>
struct ParamsFile {
  std::string kind;
  std::vector<std::size_t> shape;
  Params values;
};

ParamsFile describe_params(const FunctionClass& cls, const Params& params);

std::string params_to_text(const ParamsFile& file);
ParamsFile params_from_text(const std::string& text);

void save_params(const ParamsFile& file, const std::string& path);
ParamsFile load_params(const std::string& path);

/// Checks that a loaded file matches `cls` (kind, shape, count) and returns the values.
Params params_for(const FunctionClass& cls, const ParamsFile& file);

}  // namespace eniac
