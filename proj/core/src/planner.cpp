#include "sectar/planner.hpp"

#include <exception>
#include <stdexcept>
#include <thread>
#include <utility>

namespace sectar {

namespace {

std::vector<double> tensor_row(const Tensor& m, int r) {
  std::vector<double> out(static_cast<std::size_t>(m.cols()));
  for (int c = 0; c < m.cols(); ++c) out[static_cast<std::size_t>(c)] = m.at(r, c);
  return out;
}

void check_model_inputs(const TrajectoryModel& model,
                        const std::vector<double>& s0,
                        const PlannerConfig& cfg) {
  cfg.validate();
  if (static_cast<int>(s0.size()) != model.state_dim()) {
    throw std::invalid_argument("planner: start state has the wrong dimension");
  }
  if (cfg.segment_steps != model.horizon()) {
    throw std::invalid_argument(
        "planner: segment_steps differs from the model horizon");
  }
}

// Scores candidate rows [row0, row1) in lockstep: one batched decode per
// segment depth, waypoint bookkeeping per row. Writes into returns[row].
void score_block(const TrajectoryModel& model, const Tensor& candidates,
                 int row0, int row1, const std::vector<double>& s0,
                 const WaypointTask& task, const TaskProgress& start,
                 double gamma, int depth, std::vector<double>& returns) {
  const int b = row1 - row0;
  const int dz = model.latent_dim();
  const int sd = model.state_dim();
  const int steps = model.horizon();

  Tensor cur({b, sd});
  for (int r = 0; r < b; ++r) {
    for (int c = 0; c < sd; ++c) cur.at(r, c) = s0[static_cast<std::size_t>(c)];
  }
  std::vector<TaskProgress> progress(static_cast<std::size_t>(b), start);
  std::vector<double> total(static_cast<std::size_t>(b), 0.0);

  double discount = 1.0;
  for (int h = 0; h < depth; ++h) {
    Tensor z({b, dz});
    for (int r = 0; r < b; ++r) {
      for (int c = 0; c < dz; ++c) z.at(r, c) = candidates.at(row0 + r, h * dz + c);
    }
    std::vector<Tensor> path = model.predict_mean_states(z, cur);
    for (int t = 1; t <= steps; ++t) {
      for (int r = 0; r < b; ++r) {
        total[static_cast<std::size_t>(r)] +=
            discount * step_progress(task, progress[static_cast<std::size_t>(r)],
                                     tensor_row(path[static_cast<std::size_t>(t)], r));
      }
      discount *= gamma;
    }
    cur = path.back();
  }
  for (int r = 0; r < b; ++r) returns[static_cast<std::size_t>(row0 + r)] = total[static_cast<std::size_t>(r)];
}

}  // namespace

void PlannerConfig::validate() const {
  if (candidates < 1) throw std::invalid_argument("PlannerConfig: candidates must be >= 1");
  if (depth < 1) throw std::invalid_argument("PlannerConfig: depth must be >= 1");
  if (segment_steps < 1) {
    throw std::invalid_argument("PlannerConfig: segment_steps must be >= 1");
  }
  if (gamma < 0.0 || gamma > 1.0) {
    throw std::invalid_argument("PlannerConfig: gamma must be in [0, 1]");
  }
  if (jobs < 1) throw std::invalid_argument("PlannerConfig: jobs must be >= 1");
}

Plan simulate_latents(const TrajectoryModel& model, const Tensor& latents,
                      const std::vector<double>& s0, const WaypointTask& task,
                      TaskProgress progress, double gamma) {
  const int dz = model.latent_dim();
  const int sd = model.state_dim();
  const int steps = model.horizon();
  if (latents.rank() != 2 || latents.cols() != dz || latents.rows() < 1) {
    throw std::invalid_argument("simulate_latents: latents must be depth x d_z");
  }
  if (static_cast<int>(s0.size()) != sd) {
    throw std::invalid_argument("simulate_latents: start state has the wrong dimension");
  }
  const int depth = latents.rows();

  Plan out;
  out.latents = latents;
  out.states = Tensor({depth * steps + 1, sd});
  Tensor cur({1, sd});
  for (int c = 0; c < sd; ++c) {
    cur.at(0, c) = s0[static_cast<std::size_t>(c)];
    out.states.at(0, c) = s0[static_cast<std::size_t>(c)];
  }

  double discount = 1.0;
  int row = 1;
  for (int h = 0; h < depth; ++h) {
    Tensor z({1, dz});
    for (int c = 0; c < dz; ++c) z.at(0, c) = latents.at(h, c);
    std::vector<Tensor> path = model.predict_mean_states(z, cur);
    for (int t = 1; t <= steps; ++t, ++row) {
      std::vector<double> state = tensor_row(path[static_cast<std::size_t>(t)], 0);
      for (int c = 0; c < sd; ++c) out.states.at(row, c) = state[static_cast<std::size_t>(c)];
      out.predicted_return += discount * step_progress(task, progress, state);
      discount *= gamma;
    }
    cur = path.back();
  }
  return out;
}

Plan plan_over(const TrajectoryModel& model, const Tensor& candidates,
               const std::vector<double>& s0, const WaypointTask& task,
               TaskProgress progress, const PlannerConfig& cfg,
               std::vector<double>* returns_out) {
  check_model_inputs(model, s0, cfg);
  const int dz = model.latent_dim();
  if (candidates.rank() != 2 || candidates.cols() != cfg.depth * dz ||
      candidates.rows() < 1) {
    throw std::invalid_argument("plan_over: candidate matrix has the wrong shape");
  }
  const int k = candidates.rows();

  std::vector<double> returns(static_cast<std::size_t>(k), 0.0);
  const int jobs = std::min(cfg.jobs, k);
  if (jobs <= 1) {
    score_block(model, candidates, 0, k, s0, task, progress, cfg.gamma,
                cfg.depth, returns);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
    for (int j = 0; j < jobs; ++j) {
      const int row0 = k * j / jobs;
      const int row1 = k * (j + 1) / jobs;
      workers.emplace_back([&, j, row0, row1] {
        try {
          score_block(model, candidates, row0, row1, s0, task, progress,
                      cfg.gamma, cfg.depth, returns);
        } catch (...) {
          errors[static_cast<std::size_t>(j)] = std::current_exception();
        }
      });
    }
    for (std::thread& w : workers) w.join();
    for (const std::exception_ptr& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  int best = 0;
  for (int r = 1; r < k; ++r) {
    if (returns[static_cast<std::size_t>(r)] > returns[static_cast<std::size_t>(best)]) best = r;
  }

  Tensor chosen({cfg.depth, dz});
  for (int h = 0; h < cfg.depth; ++h) {
    for (int c = 0; c < dz; ++c) chosen.at(h, c) = candidates.at(best, h * dz + c);
  }
  Plan out = simulate_latents(model, chosen, s0, task, progress, cfg.gamma);
  out.candidate = best;
  if (returns_out != nullptr) *returns_out = std::move(returns);
  return out;
}

Plan plan(const TrajectoryModel& model, const std::vector<double>& s0,
          const WaypointTask& task, TaskProgress progress,
          const PlannerConfig& cfg, Rng& rng) {
  check_model_inputs(model, s0, cfg);
  const int width = cfg.depth * model.latent_dim();
  Tensor candidates({cfg.candidates, width});
  for (int r = 0; r < cfg.candidates; ++r) {
    for (int c = 0; c < width; ++c) candidates.at(r, c) = rng.normal();
  }
  return plan_over(model, candidates, s0, task, progress, cfg);
}

MpcResult mpc_episode(Env& env, const TrajectoryModel& model,
                      const LatentPolicy& policy, const PlannerConfig& cfg,
                      int steps, Rng& rng) {
  check_model_inputs(model, env.state(), cfg);
  if (steps < 1) throw std::invalid_argument("mpc_episode: steps must be >= 1");
  const EnvSpec& spec = env.spec();

  MpcResult out;
  out.executed.states = Tensor({steps + 1, spec.state_dim});
  out.executed.actions = Tensor({steps, spec.discrete() ? 1 : spec.action_dim});

  std::vector<double> state = env.state();
  out.visited.push_back(state);
  for (int c = 0; c < spec.state_dim; ++c) out.executed.states.at(0, c) = state[static_cast<std::size_t>(c)];

  int done = 0;
  while (done < steps) {
    Plan p = plan(model, state, env.task(), env.progress(), cfg, rng);
    Tensor z({model.latent_dim()});
    for (int c = 0; c < model.latent_dim(); ++c) z.at(c) = p.latents.at(0, c);
    out.plans.push_back(std::move(p));

    const int chunk = std::min(cfg.segment_steps, steps - done);
    for (int t = 0; t < chunk; ++t) {
      Action a = policy.act(state, z, rng);
      StepResult r = env.step(a);
      if (spec.discrete()) {
        out.executed.actions.at(done, 0) = a.index;
      } else {
        for (int c = 0; c < spec.action_dim; ++c) {
          out.executed.actions.at(done, c) = a.values[static_cast<std::size_t>(c)];
        }
      }
      state = r.state;
      out.total_reward += r.reward;
      ++done;
      for (int c = 0; c < spec.state_dim; ++c) {
        out.executed.states.at(done, c) = state[static_cast<std::size_t>(c)];
      }
      out.visited.push_back(state);
    }
  }
  return out;
}

}  // namespace sectar
