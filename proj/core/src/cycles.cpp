#include "speedup/cycles.hpp"

#include <string>

namespace speedup {

void WindowSystem::Check() const {
  for (size_t s = 0; s < starts.size(); ++s) {
    if (starts[s] < 0 || starts[s] + window_length > span)
      throw Error("ValidationError", "window " + std::to_string(s) + " leaves [M']");
    if (s > 0 && starts[s] - starts[s - 1] < window_length)
      throw Error("ValidationError", "window gap below M at " + std::to_string(s));
  }
}

WindowSystem WindowSystem::Tiled(int window_length, int count) {
  WindowSystem w;
  w.window_length = window_length;
  w.span = window_length * count;
  for (int s = 0; s < count; ++s) w.starts.push_back(s * window_length);
  return w;
}

int StageCount(int w, int p, int pass) { return pass >= w ? 0 : (w - pass) / p; }

std::vector<Cycle> BuildCycles(const WindowSystem& windows,
                               const std::vector<WindowSamples>& samples, int p) {
  const int w = windows.count();
  if (p < 1 || p > w) throw Error("ValidationError", "p must lie in [1, w]");
  std::vector<int> owner(windows.span, -1);
  std::vector<Cycle> out;
  int tuple = 0;
  for (size_t t = 0; t < samples.size(); ++t) {
    Cycle cycle;
    cycle.p = p;
    cycle.sample = static_cast<int>(t);
    for (int l = 0; l < p; ++l)
      for (int j = 0; j < StageCount(w, p, l); ++j) {
        Stage stage;
        stage.pass = l;
        stage.index = j;
        for (int i = 0; i < p; ++i) {
          int s = j * p + l + i;
          int offset = samples[t][s][i];
          if (offset < 0 || offset >= windows.window_length)
            throw Error("ValidationError", "undefined offset in window " + std::to_string(s));
          int pos = windows.Position(s, offset);
          if (owner[pos] >= 0) throw Error("Collision", "position " + std::to_string(pos));
          owner[pos] = tuple;
          stage.positions.push_back(pos);
        }
        ++tuple;
        cycle.stages.push_back(std::move(stage));
      }
    out.push_back(std::move(cycle));
  }
  return out;
}

std::vector<int> CoveringMultiplicity(int w, int p) {
  std::vector<int> mult(w, 0);
  for (int l = 0; l < p; ++l)
    for (int j = 0; j < StageCount(w, p, l); ++j)
      for (int i = 0; i < p; ++i) ++mult[j * p + l + i];
  return mult;
}

}  // namespace speedup
