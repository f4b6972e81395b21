#include "bbs/io.hpp"

#include <cctype>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace bbs::io {

namespace {

Boundary parse_boundary(const std::string& name, bool left) {
  if (name == "vacuum") return Boundary::Vacuum;
  if (name == "periodic") return Boundary::Periodic;
  if (name == "open" && !left) return Boundary::Open;
  throw Error("window: bad boundary '" + name + "'");
}

}  // namespace

std::string format_window(const ParticleWindow& w) {
  std::string out = "origin=" + std::to_string(w.origin) +
                    " left=" + boundary_name(w.left) +
                    " right=" + boundary_name(w.right) + "\n";
  out.reserve(out.size() + w.cells.size() + 1);
  for (auto c : w.cells) out += c ? '1' : '0';
  out += '\n';
  return out;
}

ParticleWindow read_window(std::istream& in) {
  std::string header, cells;
  if (!std::getline(in, header)) throw Error("window: missing header line");
  if (!std::getline(in, cells)) throw Error("window: missing cell line");
  ParticleWindow w;
  std::istringstream hs(header);
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw Error("window: bad header token '" + tok + "'");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "origin")
      w.origin = std::stoll(val);
    else if (key == "left")
      w.left = parse_boundary(val, true);
    else if (key == "right")
      w.right = parse_boundary(val, false);
    else
      throw Error("window: unknown header key '" + key + "'");
  }
  w.cells.reserve(cells.size());
  for (char c : cells) {
    if (c == '0' || c == '1')
      w.cells.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (!std::isspace(static_cast<unsigned char>(c)))
      throw Error("window: cell characters must be 0 or 1");
  }
  w.validate();
  return w;
}

ParticleWindow parse_window(const std::string& text) {
  std::istringstream in(text);
  return read_window(in);
}

void write_trace_csv(std::ostream& out, const EvolutionTrace& trace) {
  out << "step,site,eta\n";
  for (std::size_t j = 0; j < trace.frames.size(); ++j) {
    const ParticleWindow& f = trace.frames[j];
    for (Site n = f.first(); n <= f.last(); ++n)
      out << j << ',' << n << ',' << static_cast<int>(f.at(n)) << '\n';
  }
}

void write_current_csv(std::ostream& out, const analysis::CurrentRecord& rec) {
  out << "k,w0,C\n";
  for (std::size_t j = 0; j < rec.w0.size(); ++j)
    out << j << ',' << rec.w0[j] << ',' << rec.c[j] << '\n';
}

analysis::CurrentRecord read_current_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,w0", 0) != 0)
    throw Error("current csv: missing header");
  std::vector<Value> w0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    if (c1 == std::string::npos) throw Error("current csv: bad row");
    const auto c2 = line.find(',', c1 + 1);
    const std::string field =
        c2 == std::string::npos ? line.substr(c1 + 1) : line.substr(c1 + 1, c2 - c1 - 1);
    w0.push_back(std::stoll(field));
  }
  if (w0.empty()) throw Error("current csv: no rows");
  return analysis::make_current_record(std::move(w0));
}

void write_reconstruction_csv(std::ostream& out,
                              const analysis::Reconstruction& rec) {
  out << "k,n,eta,determined\n";
  for (Site d = 0; d <= rec.depth; ++d) {
    const auto& col = rec.columns[static_cast<std::size_t>(d)];
    for (std::int64_t k = 0; k <= rec.steps; ++k) {
      const auto cell = col[static_cast<std::size_t>(k)];
      out << k << ',' << -d << ','
          << static_cast<int>(cell) << ','
          << (cell == analysis::CellState::Unknown ? 0 : 1) << '\n';
    }
  }
}

std::map<std::string, std::string> parse_kv(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos)
        throw Error("config: expected key=value, got '" + tok + "'");
      kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  return kv;
}

}  // namespace bbs::io
