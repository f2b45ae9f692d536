#include "eniac/param_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eniac {

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& token) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size())
    throw std::invalid_argument("params: bad number '" + token + "'");
  return v;
}

}  // namespace

ParamsFile describe_params(const FunctionClass& cls, const Params& params) {
  if (static_cast<std::size_t>(params.size()) != cls.num_params())
    throw std::invalid_argument("params: vector does not match class");
  return ParamsFile{cls.kind(), cls.shape(), params};
}

std::string params_to_text(const ParamsFile& file) {
  std::string out = "eniac-params 1\nkind " + file.kind + "\nshape";
  for (std::size_t n : file.shape) out += ' ' + std::to_string(n);
  out += "\ncount " + std::to_string(file.values.size()) + '\n';
  for (Eigen::Index i = 0; i < file.values.size(); ++i) out += format_double(file.values[i]) + '\n';
  return out;
}

ParamsFile params_from_text(const std::string& text) {
  std::istringstream in(text);
  std::string line, word;
  ParamsFile file;

  if (!std::getline(in, line) || line != "eniac-params 1")
    throw std::invalid_argument("params: missing 'eniac-params 1' header");
  if (!std::getline(in, line) || line.rfind("kind ", 0) != 0)
    throw std::invalid_argument("params: missing kind line");
  file.kind = line.substr(5);
  if (!std::getline(in, line) || line.rfind("shape", 0) != 0)
    throw std::invalid_argument("params: missing shape line");
  {
    std::istringstream shape(line.substr(5));
    std::size_t n;
    while (shape >> n) file.shape.push_back(n);
  }
  if (!std::getline(in, line) || line.rfind("count ", 0) != 0)
    throw std::invalid_argument("params: missing count line");
  const auto count = static_cast<Eigen::Index>(std::stoull(line.substr(6)));
  file.values.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    if (!(in >> word)) throw std::invalid_argument("params: truncated value list");
    file.values[i] = parse_double(word);
  }
  if (in >> word) throw std::invalid_argument("params: trailing data after values");
  return file;
}

void save_params(const ParamsFile& file, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << params_to_text(file);
}

ParamsFile load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return params_from_text(buf.str());
}

Params params_for(const FunctionClass& cls, const ParamsFile& file) {
  if (file.kind != cls.kind()) throw std::invalid_argument("params: kind mismatch");
  if (file.shape != cls.shape()) throw std::invalid_argument("params: shape mismatch");
  if (static_cast<std::size_t>(file.values.size()) != cls.num_params())
    throw std::invalid_argument("params: count mismatch");
  return file.values;
}

}  // namespace eniac
