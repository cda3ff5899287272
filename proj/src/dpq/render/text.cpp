#include <algorithm>
#include <sstream>

#include "dpq/render/render.hpp"

namespace dpq::render {

using circuit::Circuit;
using circuit::GateInstance;

namespace {

struct Glyphs {
  std::string qwire, bwire, vert;
};

// the glyph for one wire position of a gate
std::string gate_glyph(const GateInstance& g, int wire_index, bool is_control) {
  const auto& info = *g.gate;
  if (is_control) return "*";
  std::string params;
  if (!g.params.empty()) {
    params = "(";
    for (size_t i = 0; i < g.params.size(); i++) {
      if (i) params += ",";
      params += std::to_string(g.params[i]);
    }
    params += ")";
  }
  if (info.style == "init") return "|0>";
  if (info.style == "term") return "<0|";
  if (info.style == "meas") return "[M]";
  if (info.style == "discard") return "[/]";
  if (info.style == "oplus") return "(+)";
  (void)wire_index;
  return "[" + info.name + params + "]";
}

}  // namespace

std::string render_text(const Circuit& c, const Options& opt) {
  Glyphs gl = opt.ascii ? Glyphs{"-", "=", "|"} : Glyphs{"─", "═", "│"};
  Layout lay = layout(c);
  int rows = (int)lay.tracks.size();
  if (rows == 0) return "(no wires)\n";

  // per (track, column): an optional glyph
  struct Cell {
    std::string glyph;
    bool vertical = false;
  };
  std::vector<std::vector<Cell>> grid((size_t)rows,
                                      std::vector<Cell>((size_t)lay.columns));
  for (size_t gi = 0; gi < c.gates.size(); gi++) {
    const auto& g = c.gates[gi];
    const Placement& p = lay.placements[gi];
    int controls = g.gate->controls;
    int first_control = (int)g.ins.size() - controls;
    std::vector<bool> has_glyph((size_t)rows, false);
    for (size_t i = 0; i < g.ins.size(); i++) {
      bool is_control = (int)i >= first_control && controls > 0;
      Cell& cell = grid[(size_t)p.in_pos[i]][(size_t)p.column];
      cell.glyph = gate_glyph(g, (int)i, is_control);
      has_glyph[(size_t)p.in_pos[i]] = true;
    }
    if (g.ins.empty())
      for (int pos : p.out_pos) {
        grid[(size_t)pos][(size_t)p.column].glyph = gate_glyph(g, 0, false);
        has_glyph[(size_t)pos] = true;
      }
    if (p.bottom > p.top)
      for (int t = p.top; t <= p.bottom; t++)
        if (!has_glyph[(size_t)t]) grid[(size_t)t][(size_t)p.column].vertical = true;
  }

  std::vector<int> width((size_t)lay.columns, 1);
  for (int t = 0; t < rows; t++)
    for (int col = 0; col < lay.columns; col++) {
      const Cell& cell = grid[(size_t)t][(size_t)col];
      if (!cell.glyph.empty())
        width[(size_t)col] = std::max(width[(size_t)col], (int)cell.glyph.size());
    }

  std::ostringstream out;
  for (int t = 0; t < rows; t++) {
    const TrackInfo& tr = lay.tracks[(size_t)t];
    std::string row;
    auto wire_at = [&](int col) -> std::string {
      bool born = tr.birth_col < 0 || col > tr.birth_col;
      bool alive = tr.death_col < 0 || col <= tr.death_col;
      if (!born || !alive) return " ";
      circuit::Carrier carrier = tr.carrier;
      for (auto& [ccol, cc] : tr.changes)
        if (col > ccol) carrier = cc;
      return carrier == "Bit" ? gl.bwire : gl.qwire;
    };
    // leading stub
    row += tr.birth_col < 0 ? wire_at(0) : " ";
    for (int col = 0; col < lay.columns; col++) {
      const Cell& cell = grid[(size_t)t][(size_t)col];
      std::string pad_before = cell.glyph.empty() && !cell.vertical
                                   ? wire_at(col)
                                   : (tr.birth_col == col ? " " : wire_at(col));
      // cell body
      std::string body;
      int w = width[(size_t)col];
      if (!cell.glyph.empty()) {
        int extra = w - (int)cell.glyph.size();
        int left = extra / 2;
        std::string fill_l, fill_r;
        for (int i = 0; i < left; i++) fill_l += wire_at(col + 1);
        for (int i = 0; i < extra - left; i++) fill_r += wire_at(col + 1);
        body = fill_l + cell.glyph + fill_r;
      } else if (cell.vertical) {
        int left = (w - 1) / 2;
        std::string fill_l, fill_r;
        std::string seg = wire_at(col);
        bool alive = seg != " ";
        for (int i = 0; i < left; i++) fill_l += alive ? seg : " ";
        for (int i = 0; i < w - 1 - left; i++) fill_r += alive ? seg : " ";
        body = fill_l + gl.vert + fill_r;
      } else {
        std::string seg = wire_at(col);
        for (int i = 0; i < w; i++) body += seg;
      }
      row += pad_before + body + (cell.glyph.empty() && !cell.vertical
                                      ? wire_at(col)
                                      : wire_at(col + 1));
    }
    // trailing stub for surviving wires
    bool alive_end = (tr.death_col < 0) &&
                     (tr.birth_col < 0 || tr.birth_col < lay.columns);
    if (alive_end) {
      circuit::Carrier carrier = tr.carrier;
      for (auto& [ccol, cc] : tr.changes) {
        (void)ccol;
        carrier = cc;
      }
      row += carrier == "Bit" ? gl.bwire : gl.qwire;
    }
    // trim trailing spaces
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out << row << "\n";
  }
  return out.str();
}

}  // namespace dpq::render
