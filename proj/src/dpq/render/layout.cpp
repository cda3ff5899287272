#include <algorithm>
#include <map>

#include "dpq/render/render.hpp"

namespace dpq::render {

using circuit::Circuit;
using circuit::Wire;

Layout layout(const Circuit& c) {
  struct Build {
    circuit::Carrier carrier;
    int birth_gate = -1;
    int death_gate = -1;
    bool is_output = false;
    std::vector<std::pair<int, circuit::Carrier>> gate_changes;
  };
  std::vector<Build> tracks;
  std::vector<int> order;  // track ids in display order
  std::map<uint32_t, int> track_of;

  auto display_pos = [&](int tid) {
    for (size_t i = 0; i < order.size(); i++)
      if (order[i] == tid) return (int)i;
    return -1;
  };

  for (auto& w : c.inputs) {
    int tid = (int)tracks.size();
    tracks.push_back({w.carrier, -1, -1, false, {}});
    track_of[w.id] = tid;
    order.push_back(tid);
  }

  for (size_t gi = 0; gi < c.gates.size(); gi++) {
    const auto& g = c.gates[gi];
    if (g.ins.empty()) {
      for (auto& w : g.outs) {
        int tid = (int)tracks.size();
        tracks.push_back({w.carrier, (int)gi, -1, false, {}});
        // place the new track next to its first interaction partner
        int pos = -1;
        for (size_t gj = gi + 1; gj < c.gates.size(); gj++) {
          bool uses = false;
          for (auto& in : c.gates[gj].ins) uses = uses || in.id == w.id;
          if (!uses) continue;
          for (auto& in : c.gates[gj].ins) {
            if (in.id == w.id) continue;
            auto it = track_of.find(in.id);
            if (it != track_of.end()) pos = std::max(pos, display_pos(it->second));
          }
          break;
        }
        track_of[w.id] = tid;
        if (pos >= 0)
          order.insert(order.begin() + pos + 1, tid);
        else
          order.push_back(tid);
      }
      continue;
    }
    // positional inheritance of tracks from inputs to outputs
    std::vector<bool> inherited(g.ins.size(), false);
    for (size_t i = 0; i < g.outs.size(); i++) {
      size_t src = std::min(i, g.ins.size() - 1);
      int tid = track_of.at(g.ins[src].id);
      track_of[g.outs[i].id] = tid;
      inherited[src] = true;
      if (g.outs[i].carrier != tracks[(size_t)tid].carrier)
        tracks[(size_t)tid].gate_changes.push_back({(int)gi, g.outs[i].carrier});
    }
    for (size_t i = 0; i < g.ins.size(); i++) {
      if (!inherited[i]) tracks[(size_t)track_of.at(g.ins[i].id)].death_gate = (int)gi;
    }
  }
  for (auto& w : c.outputs) {
    auto it = track_of.find(w.id);
    if (it != track_of.end()) tracks[(size_t)it->second].is_output = true;
  }

  // greedy earliest-column packing over display positions
  Layout out;
  std::vector<int> pos_of_track(tracks.size(), 0);
  for (size_t i = 0; i < order.size(); i++) pos_of_track[(size_t)order[i]] = (int)i;

  std::vector<int> busy(order.size(), -1);
  std::vector<int> gate_col(c.gates.size(), 0);
  out.placements.resize(c.gates.size());
  for (size_t gi = 0; gi < c.gates.size(); gi++) {
    const auto& g = c.gates[gi];
    Placement p;
    int lo = (int)order.size(), hi = -1;
    auto touch = [&](const Wire& w) {
      int pos = pos_of_track[(size_t)track_of.at(w.id)];
      lo = std::min(lo, pos);
      hi = std::max(hi, pos);
      return pos;
    };
    for (auto& w : g.ins) p.in_pos.push_back(touch(w));
    for (auto& w : g.outs) p.out_pos.push_back(touch(w));
    if (hi < 0) {
      lo = hi = 0;  // no-wire gate; degenerate
    }
    int col = 0;
    for (int t = lo; t <= hi; t++) col = std::max(col, busy[(size_t)t] + 1);
    for (int t = lo; t <= hi; t++) busy[(size_t)t] = col;
    p.column = col;
    p.top = lo;
    p.bottom = hi;
    gate_col[gi] = col;
    out.placements[gi] = std::move(p);
    out.columns = std::max(out.columns, col + 1);
  }

  out.tracks.resize(order.size());
  for (size_t i = 0; i < order.size(); i++) {
    const Build& b = tracks[(size_t)order[i]];
    TrackInfo t;
    t.carrier = b.carrier;
    t.birth_col = b.birth_gate < 0 ? -1 : gate_col[(size_t)b.birth_gate];
    t.death_col = b.death_gate < 0 ? -1 : gate_col[(size_t)b.death_gate];
    t.is_output = b.is_output;
    for (auto& [gidx, carrier] : b.gate_changes)
      t.changes.push_back({gate_col[(size_t)gidx], carrier});
    out.tracks[i] = std::move(t);
  }
  return out;
}

}  // namespace dpq::render
