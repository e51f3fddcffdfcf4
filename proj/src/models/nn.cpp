#include "factcheck/models/nn.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"

namespace fc::nn {

std::size_t ParamLayout::add(std::string name, std::size_t rows, std::size_t cols, bool decay,
                             double l2) {
  Tensor t;
  t.name = std::move(name);
  t.offset = total_;
  t.rows = rows;
  t.cols = cols;
  t.decay = decay;
  t.l2 = l2;
  total_ += t.size();
  tensors_.push_back(std::move(t));
  return tensors_.size() - 1;
}

void init_fan_in(std::span<double> params, const Tensor& t, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(std::max<std::size_t>(t.rows, 1)));
  for (std::size_t i = 0; i < t.size(); ++i) params[t.offset + i] = rng.uniform(-bound, bound);
}

void NesterovSgd::step(std::span<double> params, std::span<const double> grad) {
  if (velocity_.size() != params.size()) velocity_.assign(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    velocity_[i] = mu_ * velocity_[i] - lr_ * grad[i];
    params[i] += mu_ * velocity_[i] - lr_ * grad[i];
  }
}

void RmsProp::step(std::span<double> params, std::span<const double> grad) {
  if (cache_.size() != params.size()) cache_.assign(params.size(), 0.0);
  for (std::size_t i = 0; i < params.size(); ++i) {
    cache_[i] = rho_ * cache_[i] + (1.0 - rho_) * grad[i] * grad[i];
    params[i] -= lr_ * grad[i] / (std::sqrt(cache_[i]) + eps_);
  }
}

double l2_penalty(const ParamLayout& layout, std::span<const double> params, double scale,
                  std::span<double> grad) {
  double penalty = 0.0;
  for (const auto& t : layout.tensors()) {
    if (!t.decay || t.l2 == 0.0) continue;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const double w = params[t.offset + i];
      penalty += 0.5 * t.l2 * w * w;
      if (!grad.empty()) grad[t.offset + i] += scale * t.l2 * w;
    }
  }
  return penalty * scale;
}

void ModelFile::write(std::ostream& out) const {
  out << "factcheck-model " << kind << " v" << version << '\n';
  for (const auto& [k, v] : config) out << k << ' ' << v << '\n';
  out << "params " << params.size() << '\n';
  for (std::size_t i = 0; i < params.size(); ++i) {
    out << format_double(params[i]) << ((i + 1) % 8 == 0 || i + 1 == params.size() ? '\n' : ' ');
  }
  out << "end\n";
}

ModelFile ModelFile::read(std::istream& in, const std::string& expected_kind) {
  ModelFile f;
  std::string line;
  std::size_t n = 1;
  if (!std::getline(in, line)) throw ParseError("empty model file", 1);
  {
    std::istringstream ss(line);
    std::string magic, version;
    ss >> magic >> f.kind >> version;
    if (magic != "factcheck-model" || version.size() < 2 || version[0] != 'v') {
      throw ParseError("not a model file", 1);
    }
    f.version = std::stoi(version.substr(1));
  }
  if (f.kind != expected_kind) {
    throw SchemaError("model file holds a '" + f.kind + "' model, expected '" + expected_kind + "'");
  }
  std::size_t count = 0;
  bool have_params = false;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto sp = line.find(' ');
    std::string key = line.substr(0, sp);
    std::string value = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (key == "params") {
      count = std::stoul(value);
      have_params = true;
      break;
    }
    f.config[key] = value;
  }
  if (!have_params) throw ParseError("model file has no parameter block", n);
  f.params.reserve(count);
  std::string tok;
  while (f.params.size() < count && in >> tok) f.params.push_back(parse_double(tok));
  if (f.params.size() != count) throw ParseError("truncated parameter block", n);
  if (!(in >> tok) || tok != "end") throw ParseError("model file missing end marker", n);
  return f;
}

void ModelFile::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

ModelFile ModelFile::load(const std::string& path, const std::string& expected_kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read(in, expected_kind);
}

const std::string& ModelFile::get(const std::string& key) const {
  auto it = config.find(key);
  if (it == config.end()) throw SchemaError("model file lacks '" + key + "'");
  return it->second;
}

double ModelFile::get_double(const std::string& key) const { return parse_double(get(key)); }

std::size_t ModelFile::get_size(const std::string& key) const { return std::stoul(get(key)); }

std::vector<std::size_t> ModelFile::get_sizes(const std::string& key) const {
  std::vector<std::size_t> out;
  std::istringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(std::stoul(item));
  }
  return out;
}

std::string join_sizes(std::span<const std::size_t> xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(xs[i]);
  }
  return out;
}

double gradient_check(std::vector<double> params, std::span<const double> grad,
                      const std::function<double(std::span<const double>)>& loss,
                      std::span<const std::size_t> indices, double eps, double floor) {
  double worst = 0.0;
  for (auto i : indices) {
    const double keep = params[i];
    params[i] = keep + eps;
    const double up = loss(params);
    params[i] = keep - eps;
    const double down = loss(params);
    params[i] = keep;
    const double numeric = (up - down) / (2.0 * eps);
    const double err = std::abs(grad[i] - numeric) / std::max(std::abs(grad[i]) + std::abs(numeric), floor);
    worst = std::max(worst, err);
  }
  return worst;
}

}  // namespace fc::nn
