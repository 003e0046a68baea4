#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "qkdlab/adversary.hpp"

namespace qkdlab {

namespace {

struct Row {
  std::size_t label_index;
  std::size_t ancilla;
  Complex amplitude;
};

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::invalid_argument("coherent attack line " + std::to_string(line) + ": " + what);
}

}  // namespace

CoherentAttack parse_coherent_attack(std::istream& in) {
  std::vector<Row> rows;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> seen;
  std::size_t n_pairs = 0;
  std::size_t declared_dim = 0;
  std::size_t max_ancilla = 0;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;

    if (first == "ancilla_dim") {
      if (!(fields >> declared_dim) || declared_dim == 0) fail(line_no, "bad ancilla_dim");
      continue;
    }
    std::size_t ancilla = 0;
    double re = 0.0, im = 0.0;
    if (!(fields >> ancilla >> re >> im)) fail(line_no, "expected <labels> <ancilla> <re> <im>");
    std::string extra;
    if (fields >> extra) fail(line_no, "trailing fields");
    if (n_pairs == 0) n_pairs = first.size();
    if (first.size() != n_pairs) fail(line_no, "label string length differs from earlier rows");

    std::size_t index = 0;
    for (char c : first) {
      if (c < '0' || c > '3') fail(line_no, "labels must be digits 0-3");
      index = index * 4 + static_cast<std::size_t>(c - '0');
    }
    if (!seen.emplace(std::make_pair(index, ancilla), line_no).second) fail(line_no, "duplicate row");
    max_ancilla = std::max(max_ancilla, ancilla);
    rows.push_back({index, ancilla, Complex(re, im)});
  }
  if (rows.empty()) throw std::invalid_argument("coherent attack file has no amplitude rows");
  const std::size_t dim = declared_dim ? declared_dim : max_ancilla + 1;
  if (max_ancilla >= dim) throw std::invalid_argument("ancilla index exceeds declared ancilla_dim");
  if (n_pairs > kMaxCoherentPairs || dim > kMaxAncillaDim)
    throw std::invalid_argument("coherent attack exceeds the 6-pair / 16-dim ancilla cap");

  CVector amplitudes = CVector::Zero(static_cast<Eigen::Index>((std::size_t{1} << (2 * n_pairs)) * dim));
  for (const auto& row : rows)
    amplitudes(static_cast<Eigen::Index>(row.label_index * dim + row.ancilla)) = row.amplitude;
  return CoherentAttack(n_pairs, dim, std::move(amplitudes));
}

CoherentAttack load_coherent_attack(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open coherent attack file " + path);
  return parse_coherent_attack(in);
}

void write_coherent_attack(std::ostream& out, const CoherentAttack& attack) {
  const std::size_t d = attack.ancilla_dim();
  const std::size_t n = attack.n_pairs();
  out << "ancilla_dim " << d << '\n';
  char buffer[96];
  for (Eigen::Index i = 0; i < attack.bell_amplitudes().size(); ++i) {
    const Complex a = attack.bell_amplitudes()(i);
    if (a == Complex(0.0, 0.0)) continue;
    std::size_t label_index = static_cast<std::size_t>(i) / d;
    std::string labels(n, '0');
    for (std::size_t k = n; k-- > 0;) {
      labels[k] = static_cast<char>('0' + label_index % 4);
      label_index /= 4;
    }
    std::snprintf(buffer, sizeof buffer, " %zu %.17g %.17g\n", static_cast<std::size_t>(i) % d, a.real(),
                  a.imag());
    out << labels << buffer;
  }
}

}  // namespace qkdlab
