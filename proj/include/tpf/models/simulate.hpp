#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tpf/core/rng.hpp"
#include "tpf/core/window.hpp"

namespace tpf {

template <class State, class Obs>
struct SimulatedPath {
  std::vector<State> hidden;
  ObservationWindow<Obs> window;
};

// Draws X_0..X_{n-1} and Y_0..Y_{n-1}. Step t uses its own stream, so a
// longer simulation with the same seed extends a shorter one.
template <class Model>
SimulatedPath<typename Model::State, typename Model::Observation> simulate(
    const Model& model, Time n, std::uint64_t seed) {
  using State = typename Model::State;
  using Obs = typename Model::Observation;
  if (n < 1) throw std::invalid_argument("simulate: n must be >= 1");
  const ObservationWindow<Obs> empty;
  std::vector<State> xs;
  std::vector<Obs> ys;
  xs.reserve(static_cast<std::size_t>(n));
  ys.reserve(static_cast<std::size_t>(n));
  for (Time t = 0; t < n; ++t) {
    RngStream rng(seed, {0, static_cast<std::uint64_t>(t), 0, Purpose::kSimulate});
    State x = t == 0 ? model.sample_initial(empty, rng)
                     : model.sample_mutation(empty, t - 1, xs.back(), rng);
    ys.push_back(model.sample_observation(x, rng));
    xs.push_back(x);
  }
  return {std::move(xs), ObservationWindow<Obs>(std::move(ys))};
}

template <class State, class Obs>
void write_path_csv(std::ostream& os, const SimulatedPath<State, Obs>& path) {
  os << "t,x,y\n";
  os.precision(17);
  const auto& ys = path.window.values();
  for (std::size_t t = 0; t < path.hidden.size(); ++t)
    os << t << ',' << path.hidden[t] << ',' << ys[t] << '\n';
}

}  // namespace tpf
