#include "sectar/trajectory.hpp"
#include <cstring>

#include <fstream>
#include <stdexcept>

#include "binary_io.hpp"

namespace sectar {

namespace {
constexpr char kMagic[6] = {'S', 'T', 'R', 'J', '1', '\n'};
}

std::vector<double> Trajectory::state_row(int t) const {
  std::vector<double> out(static_cast<std::size_t>(states.cols()));
  for (int c = 0; c < states.cols(); ++c) out[static_cast<std::size_t>(c)] = states.at(t, c);
  return out;
}

void validate_trajectory(const Trajectory& traj, int steps, int state_dim,
                         int action_dim) {
  if (traj.states.rank() != 2 || traj.actions.rank() != 2) {
    throw std::invalid_argument("trajectory tensors must be rank 2");
  }
  if (traj.states.rows() != steps + 1 || traj.states.cols() != state_dim) {
    throw std::invalid_argument("trajectory states are " + traj.states.shape_str() +
                                ", expected (" + std::to_string(steps + 1) + ", " +
                                std::to_string(state_dim) + ")");
  }
  if (traj.actions.rows() != steps || traj.actions.cols() != action_dim) {
    throw std::invalid_argument("trajectory actions are " + traj.actions.shape_str() +
                                ", expected (" + std::to_string(steps) + ", " +
                                std::to_string(action_dim) + ")");
  }
  if (!traj.states.all_finite() || !traj.actions.all_finite()) {
    throw std::invalid_argument("trajectory has non-finite entries");
  }
}

void save_trajectories(const std::vector<Trajectory>& trajs, const std::string& path) {
  if (trajs.empty()) throw std::invalid_argument("refusing to save an empty dataset");
  const int steps = trajs.front().steps();
  const int sd = trajs.front().state_dim();
  const int ad = trajs.front().action_dim();
  for (const Trajectory& t : trajs) validate_trajectory(t, steps, sd, ad);

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("dataset: cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  bin::put_u32(os, static_cast<std::uint32_t>(trajs.size()));
  bin::put_u32(os, static_cast<std::uint32_t>(steps));
  bin::put_u32(os, static_cast<std::uint32_t>(sd));
  bin::put_u32(os, static_cast<std::uint32_t>(ad));
  for (const Trajectory& t : trajs) {
    for (int i = 0; i < t.states.size(); ++i) bin::put_f64(os, t.states.at(i));
    for (int i = 0; i < t.actions.size(); ++i) bin::put_f64(os, t.actions.at(i));
  }
  if (!os) throw std::runtime_error("dataset: write failed for " + path);
}

std::vector<Trajectory> load_trajectories(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("dataset: cannot open " + path);
  char magic[6];
  if (!is.read(magic, 6) || std::memcmp(magic, kMagic, 6) != 0) {
    throw std::runtime_error("dataset: bad magic in " + path);
  }
  const std::uint32_t count = bin::get_u32(is, "dataset");
  const std::uint32_t steps = bin::get_u32(is, "dataset");
  const std::uint32_t sd = bin::get_u32(is, "dataset");
  const std::uint32_t ad = bin::get_u32(is, "dataset");
  if (count == 0 || steps == 0 || sd == 0 || ad == 0 || count > 10000000 ||
      steps > 100000 || sd > 100000 || ad > 100000) {
    throw std::runtime_error("dataset: implausible header in " + path);
  }
  std::vector<Trajectory> out;
  out.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    Trajectory t;
    t.states = Tensor({static_cast<int>(steps) + 1, static_cast<int>(sd)});
    t.actions = Tensor({static_cast<int>(steps), static_cast<int>(ad)});
    for (int i = 0; i < t.states.size(); ++i) t.states.at(i) = bin::get_f64(is, "dataset");
    for (int i = 0; i < t.actions.size(); ++i) t.actions.at(i) = bin::get_f64(is, "dataset");
    validate_trajectory(t, static_cast<int>(steps), static_cast<int>(sd),
                        static_cast<int>(ad));
    out.push_back(std::move(t));
  }
  char extra;
  if (is.read(&extra, 1)) throw std::runtime_error("dataset: trailing bytes in " + path);
  return out;
}

}  // namespace sectar
