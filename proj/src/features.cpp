#include "factcheck/features.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"

namespace fc {

void FeatureMatrix::append(std::string id, std::span<const double> row_values) {
  if (row_values.size() != cols()) {
    throw Error("feature row '" + id + "' has " + std::to_string(row_values.size()) +
                " values, expected " + std::to_string(cols()));
  }
  ids.push_back(std::move(id));
  values.insert(values.end(), row_values.begin(), row_values.end());
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  FeatureMatrix out;
  out.columns = columns;
  out.ids.reserve(rows.size());
  out.values.reserve(rows.size() * cols());
  for (auto r : rows) out.append(ids.at(r), row(r));
  return out;
}

FeatureMatrix FeatureMatrix::hconcat(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.ids != b.ids) throw Error("hconcat: row ids differ");
  FeatureMatrix out;
  out.columns = a.columns;
  out.columns.insert(out.columns.end(), b.columns.begin(), b.columns.end());
  out.ids = a.ids;
  out.values.reserve(a.values.size() + b.values.size());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto ra = a.row(r);
    auto rb = b.row(r);
    out.values.insert(out.values.end(), ra.begin(), ra.end());
    out.values.insert(out.values.end(), rb.begin(), rb.end());
  }
  return out;
}

void write_feature_dump(std::ostream& out, const FeatureMatrix& m) {
  out << "id";
  for (const auto& c : m.columns) out << '\t' << c;
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << m.ids[r];
    for (double v : m.row(r)) out << '\t' << format_double(v);
    out << '\n';
  }
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

FeatureMatrix read_feature_dump(std::istream& in) {
  FeatureMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty feature dump", 1);
  auto header = split_tabs(line);
  if (header.empty() || header[0] != "id") throw ParseError("feature dump header must start with id", 1);
  m.columns.assign(header.begin() + 1, header.end());
  std::size_t n = 1;
  std::vector<double> row(m.cols());
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    auto cells = split_tabs(line);
    if (cells.size() != m.cols() + 1) throw ParseError("wrong number of feature columns", n);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      try {
        row[c] = parse_double(cells[c + 1]);
      } catch (const ParseError& e) {
        throw ParseError(e.what(), n);
      }
    }
    m.append(cells[0], row);
  }
  return m;
}

void save_feature_dump(const std::string& path, const FeatureMatrix& m) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_feature_dump(out, m);
}

FeatureMatrix load_feature_dump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open feature dump '" + path + "'");
  return read_feature_dump(in);
}

Standardizer Standardizer::fit(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  Standardizer s;
  const std::size_t d = m.cols();
  s.mean_.assign(d, 0.0);
  s.scale_.assign(d, 1.0);
  if (rows.empty()) return s;
  for (auto r : rows) {
    auto x = m.row(r);
    for (std::size_t c = 0; c < d; ++c) s.mean_[c] += x[c];
  }
  const double n = static_cast<double>(rows.size());
  for (auto& v : s.mean_) v /= n;
  std::vector<double> var(d, 0.0);
  for (auto r : rows) {
    auto x = m.row(r);
    for (std::size_t c = 0; c < d; ++c) {
      const double t = x[c] - s.mean_[c];
      var[c] += t * t;
    }
  }
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(var[c] / n);
    s.scale_[c] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::fit(const FeatureMatrix& m) {
  std::vector<std::size_t> all(m.rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return fit(m, all);
}

void Standardizer::apply(std::span<double> row) const {
  if (row.size() != mean_.size()) throw Error("standardizer width mismatch");
  for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean_[c]) / scale_[c];
}

void Standardizer::apply(FeatureMatrix& m) const {
  for (std::size_t r = 0; r < m.rows(); ++r) apply(m.row(r));
}

void Standardizer::write(std::ostream& out) const {
  out << "standardizer " << mean_.size() << '\n';
  for (const auto* v : {&mean_, &scale_}) {
    for (std::size_t i = 0; i < v->size(); ++i) out << (i ? " " : "") << format_double((*v)[i]);
    out << '\n';
  }
}

Standardizer Standardizer::read(std::istream& in) {
  std::string magic;
  std::size_t n = 0;
  if (!(in >> magic >> n) || magic != "standardizer") throw ParseError("not a standardizer", 1);
  Standardizer s;
  std::string tok;
  for (auto* v : {&s.mean_, &s.scale_}) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!(in >> tok)) throw ParseError("truncated standardizer");
      v->push_back(parse_double(tok));
    }
  }
  return s;
}

}  // namespace fc
