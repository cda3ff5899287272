#pragma once

#include "dpq/circuit/circuit.hpp"

namespace dpq::render {

struct Options {
  bool ascii = false;  // plain ASCII wires instead of box drawing
};

/// Gate positions after greedy earliest-column packing. Tracks are listed in
/// display order: circuit inputs first, Init-born tracks spliced in next to
/// their first interaction.
struct Placement {
  int column = 0;
  int top = 0, bottom = 0;        // display positions spanned
  std::vector<int> in_pos, out_pos;
};

struct TrackInfo {
  circuit::Carrier carrier;
  int birth_col = -1;   // -1: live from the inputs
  int death_col = -1;   // column of the consuming gate, or -1 if it survives
  bool is_output = false;
  std::vector<std::pair<int, circuit::Carrier>> changes;  // carrier changes by column
};

struct Layout {
  int columns = 0;
  std::vector<TrackInfo> tracks;
  std::vector<Placement> placements;  // parallel to circuit.gates
};

Layout layout(const circuit::Circuit& c);

std::string render_text(const circuit::Circuit& c, const Options& opt = {});
std::string render_svg(const circuit::Circuit& c, const Options& opt = {});

}  // namespace dpq::render
