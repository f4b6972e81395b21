#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "bbs/analysis.hpp"
#include "bbs/window.hpp"

namespace bbs::io {

// Textual window format: one header line
//   origin=<int> left=<vacuum|periodic> right=<vacuum|periodic|open>
// followed by a 0/1 string.
std::string format_window(const ParticleWindow& w);
ParticleWindow parse_window(const std::string& text);
ParticleWindow read_window(std::istream& in);

// Space-time trace as CSV with columns step,site,eta.
void write_trace_csv(std::ostream& out, const EvolutionTrace& trace);

// Current record as CSV with columns k,w0,C.
void write_current_csv(std::ostream& out, const analysis::CurrentRecord& rec);
analysis::CurrentRecord read_current_csv(std::istream& in);

// Reconstruction as CSV with columns k,n,eta,determined (eta printed as
// -1 when undetermined).
void write_reconstruction_csv(std::ostream& out,
                              const analysis::Reconstruction& rec);

// key=value configuration text (one pair per line, '#' comments).
std::map<std::string, std::string> parse_kv(std::istream& in);

}  // namespace bbs::io
