#include <sstream>

#include "dpq/render/render.hpp"

namespace dpq::render {

using circuit::Circuit;

namespace {

constexpr int kColWidth = 46;
constexpr int kRowHeight = 40;
constexpr int kMarginX = 24;
constexpr int kMarginY = 24;
constexpr int kBoxW = 30;
constexpr int kBoxH = 24;

int col_x(int col) { return kMarginX + 20 + col * kColWidth + kColWidth / 2; }
int row_y(int pos) { return kMarginY + pos * kRowHeight + kRowHeight / 2; }

struct Svg {
  std::ostringstream out;
  void line(int x1, int y1, int x2, int y2, const char* cls) {
    out << "<line class=\"" << cls << "\" x1=\"" << x1 << "\" y1=\"" << y1 << "\" x2=\""
        << x2 << "\" y2=\"" << y2 << "\"/>\n";
  }
  void wire_segment(int x1, int x2, int y, bool classical) {
    if (classical) {
      line(x1, y - 2, x2, y - 2, "w");
      line(x1, y + 2, x2, y + 2, "w");
    } else {
      line(x1, y, x2, y, "w");
    }
  }
};

}  // namespace

std::string render_svg(const Circuit& c, const Options&) {
  Layout lay = layout(c);
  int rows = (int)lay.tracks.size();
  int width = kMarginX * 2 + 40 + lay.columns * kColWidth;
  int height = kMarginY * 2 + std::max(rows, 1) * kRowHeight;

  Svg svg;
  svg.out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
          << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " " << height
          << "\">\n";
  svg.out << "<style>.w{stroke:#222;stroke-width:1;fill:none}"
             ".g{stroke:#222;stroke-width:1;fill:#fff}"
             ".t{font:11px monospace;text-anchor:middle;dominant-baseline:central;"
             "fill:#111}</style>\n";

  auto carrier_at = [&](const TrackInfo& t, int col) {
    circuit::Carrier carrier = t.carrier;
    for (auto& [ccol, cc] : t.changes)
      if (col > ccol) carrier = cc;
    return carrier;
  };

  // wire segments, one per column gap so carrier changes show
  for (int p = 0; p < rows; p++) {
    const TrackInfo& t = lay.tracks[(size_t)p];
    int y = row_y(p);
    int start_col = t.birth_col < 0 ? 0 : t.birth_col;
    int end_col = t.death_col < 0 ? lay.columns : t.death_col;
    int x0 = t.birth_col < 0 ? kMarginX : col_x(t.birth_col);
    int x_end = t.death_col < 0 ? width - kMarginX : col_x(t.death_col);
    for (int seg = start_col; seg <= end_col; seg++) {
      int sx = seg == start_col ? x0 : col_x(seg - 1);
      int ex = seg == end_col ? x_end : col_x(seg);
      if (sx < ex)
        svg.wire_segment(sx, ex, y, carrier_at(t, seg) == "Bit");
    }
  }

  int id = 0;
  for (size_t gi = 0; gi < c.gates.size(); gi++) {
    const auto& g = c.gates[gi];
    const Placement& p = lay.placements[gi];
    const auto& info = *g.gate;
    int x = col_x(p.column);
    svg.out << "<g id=\"g" << id++ << "\">\n";
    if (p.bottom > p.top)
      svg.line(x, row_y(p.top), x, row_y(p.bottom), "w");

    int controls = info.controls;
    int first_control = (int)g.ins.size() - controls;
    std::string label = info.name;
    if (!g.params.empty()) {
      label += "(";
      for (size_t i = 0; i < g.params.size(); i++) {
        if (i) label += ",";
        label += std::to_string(g.params[i]);
      }
      label += ")";
    }

    auto box = [&](int y, const std::string& text) {
      int w = std::max(kBoxW, (int)text.size() * 8 + 8);
      svg.out << "<rect class=\"g\" x=\"" << x - w / 2 << "\" y=\"" << y - kBoxH / 2
              << "\" width=\"" << w << "\" height=\"" << kBoxH << "\"/>\n";
      svg.out << "<text class=\"t\" x=\"" << x << "\" y=\"" << y << "\">" << text
              << "</text>\n";
    };
    auto dot = [&](int y) {
      svg.out << "<circle class=\"g\" style=\"fill:#222\" cx=\"" << x << "\" cy=\"" << y
              << "\" r=\"4\"/>\n";
    };
    auto oplus = [&](int y) {
      svg.out << "<circle class=\"g\" cx=\"" << x << "\" cy=\"" << y << "\" r=\"8\"/>\n";
      svg.line(x - 8, y, x + 8, y, "w");
      svg.line(x, y - 8, x, y + 8, "w");
    };
    auto triangle = [&](int y, bool opening) {
      // init points right into the wire; term points left
      int x1 = opening ? x + 8 : x - 8;
      svg.out << "<path class=\"g\" d=\"M" << x1 << " " << y << " L" << (opening ? x - 6 : x + 6)
              << " " << y - 9 << " L" << (opening ? x - 6 : x + 6) << " " << y + 9
              << " Z\"/>\n";
    };

    if (info.style == "init") {
      for (int pos : p.out_pos) triangle(row_y(pos), true);
    } else if (info.style == "term" || info.style == "discard") {
      for (int pos : p.in_pos) triangle(row_y(pos), false);
    } else if (info.style == "meas") {
      for (int pos : p.in_pos) box(row_y(pos), "M");
    } else {
      for (size_t i = 0; i < g.ins.size(); i++) {
        bool is_control = (int)i >= first_control && controls > 0;
        int y = row_y(p.in_pos[i]);
        if (is_control) dot(y);
        else if (info.style == "oplus") oplus(y);
        else box(y, label);
      }
      if (g.ins.empty())
        for (int pos : p.out_pos) box(row_y(pos), label);
    }
    svg.out << "</g>\n";
  }
  svg.out << "</svg>\n";
  return svg.out.str();
}

}  // namespace dpq::render
