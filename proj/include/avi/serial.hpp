#pragma once

#include <string>

#include "avi/abstraction.hpp"
#include "avi/adp.hpp"
#include "avi/distribution.hpp"
#include "avi/mlp_policy.hpp"
#include "avi/planner.hpp"

namespace avi {

// Abstract specs: human-readable structured text with a stable field order.
void save_spec(const AbstractSpec& spec, const std::string& path);
AbstractSpec load_spec(const std::string& path);

// Policies: flat little-endian binary record (layer shape header followed by
// row-major parameters); normalizer statistics go to a text sidecar.
void save_policy(const MlpPolicy& policy, const std::string& path);
MlpPolicy load_policy(const std::string& path);
void save_norm(const RunningNorm& norm, const std::string& path);
RunningNorm load_norm(const std::string& path);

// Option sets: one .pol/.norm pair per edge plus an index file.
void save_options(const OptionSet& options, const std::string& dir);
OptionSet load_options(const std::string& dir);

// Abstract policies with their values: one line per region.
void save_abstract_policy(const AbstractPolicy& policy, const std::vector<Edge>& options,
                          const std::vector<double>& values, const std::vector<int>& region_ids,
                          const std::string& path);
struct LoadedAbstractPolicy {
    AbstractPolicy policy;
    std::vector<Edge> edges;  // per option index used by the policy
};
LoadedAbstractPolicy load_abstract_policy(const std::string& path);

// ADP tables: header (gamma, |S|, eps_T, eps_R) then one row per cell.
void save_interval_adp(const IntervalAdp& adp, const std::string& path);
void save_expected_adp(const ExpectedAdp& adp, const std::string& path);

void save_distribution(const RegionDistribution& dist, const std::string& path);
RegionDistribution load_distribution(const std::string& path);

// Learning curves: `iteration,env_steps,success_prob,disc_reward,wall_secs`.
class CurveWriter {
  public:
    explicit CurveWriter(const std::string& path);
    void append(int iteration, long env_steps, double success_prob, double disc_reward,
                double wall_secs);

  private:
    std::string path_;
};

}  // namespace avi
