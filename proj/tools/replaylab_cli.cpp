// replaylab: selection profiles, error bounds, tabular training runs and
// property suites from the command line.

#include "commands.hpp"
#include "run_config.hpp"

#include "replaylab/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <string>
#include <vector>

using replaylab::cli::RunConfig;

namespace {

void add_scheme_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--scheme", c.scheme,
                    "uniform | one-over-age | ere-staged | ere-exact | ere-approx | priority")
        ->capture_default_str();
    sub->add_option("--buffer-size", c.buffer_size, "ERE N0");
    sub->add_option("--max-horizon", c.max_horizon, "ERE L0");
    sub->add_option("--eta", c.eta, "ERE decay, in (0, 1]");
    sub->add_option("--min-coverage", c.min_coverage, "ERE c_min");
    sub->add_option("--updates-per-episode", c.updates_per_episode, "ERE K");
    sub->add_option("--priority-exponent", c.priority_exponent, "priority scheme alpha")->capture_default_str();
}

void add_common(CLI::App* sub, RunConfig& c, bool with_output) {
    sub->add_option("--config", "key=value file; explicit flags take precedence");
    sub->add_option("--seed", c.seed, "random seed")->capture_default_str();
    if (with_output) sub->add_option("--output", c.output, "output path, '-' for stdout")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = replaylab::cli::expand_config(std::move(args));
    } catch (const std::exception& ex) {
        fmt::print(stderr, "error: {}\n", ex.what());
        return 1;
    }

    CLI::App app{"Replay-buffer sampling strategies: selection profiles, evaluation-error bounds,\n"
                 "tabular off-policy training and property checks."};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    RunConfig c;

    auto* profile = app.add_subcommand("profile", "expected selection count per insertion step");
    add_scheme_options(profile, c);
    add_common(profile, c, true);
    profile->add_option("--horizon", c.profile_horizon, "number of steps T")->capture_default_str();
    profile->add_option("--batch", c.batch, "mini-batch size")->capture_default_str();
    profile->add_option("--updates", c.updates, "updates per step")->capture_default_str();
    profile->add_option("--mc-trials", c.mc_trials, "Monte Carlo repetitions (0 = analytic only)")
        ->capture_default_str();
    profile->footer(
        "CSV: time_step,expected_count,scheme[,mc_count,mc_stderr]\n"
        "ERE parameters default to N0=1000000 L0=1000 eta=0.996 c_min=5000 K=1000;\n"
        "at step n the scheme is applied to the n entries then stored.");

    auto* bound = app.add_subcommand("bound", "evaluation-error bound and its terms");
    add_common(bound, c, true);
    bound->add_option("--r-max", c.r_max)->capture_default_str();
    bound->add_option("--gamma", c.gamma)->capture_default_str();
    bound->add_option("--lipschitz", c.lipschitz, "L_A")->capture_default_str();
    bound->add_option("--diam", c.diam, "action-set diameter")->capture_default_str();
    bound->add_option("--delta", c.delta)->capture_default_str();
    bound->add_option("--episodes", c.bound_episodes, "N")->capture_default_str();
    bound->add_option("--step", c.step, "trajectory step i")->capture_default_str();
    bound->add_option("--horizon", c.bound_horizon, "trajectory length L or 'inf'")->capture_default_str();
    bound->add_option("--bellman-err", c.bellman_err)->capture_default_str();
    bound->add_option("--w1-err", c.w1_err)->capture_default_str();
    bound->add_option("--weights", c.weights, "none | equal | one-over-age | comma-separated list")
        ->capture_default_str();
    bound->footer("Output: key=value lines form, variance_initial, variance_middle, truncation,\n"
                  "bellman, mismatch, total.");

    auto* train = app.add_subcommand("train", "tabular off-policy training run");
    add_scheme_options(train, c);
    add_common(train, c, true);
    train->add_option("--env", c.env, "chain | grid | path to environment file")->capture_default_str();
    train->add_option("--episodes", c.episodes)->capture_default_str();
    train->add_option("--traj-len", c.traj_len)->capture_default_str();
    train->add_option("--batches", c.batches, "mini-batches per episode")->capture_default_str();
    train->add_option("--batch-size", c.batch_size)->capture_default_str();
    train->add_option("--lr", c.learning_rate)->capture_default_str();
    train->add_option("--tau-initial", c.tau_initial)->capture_default_str();
    train->add_option("--tau-min", c.tau_min)->capture_default_str();
    train->add_option("--tau-decay", c.tau_decay)->capture_default_str();
    train->add_option("--delta", c.delta)->capture_default_str();
    train->add_option("--eval-step", c.eval_step, "trajectory step i of the error measurement")
        ->capture_default_str();
    train->add_option("--eval-horizon", c.eval_horizon, "L of the error measurement (0 = traj-len)")
        ->capture_default_str();
    train->add_flag("--exact-fit", c.exact_fit, "use the exact Q of each policy instead of fitting");
    train->add_flag("--weighted-bound", c.weighted_bound, "weight episodes by sampling mass");
    train->add_option("--seeds", c.seeds, "run seeds seed .. seed+seeds-1")->capture_default_str();
    train->add_option("--workers", c.workers, "threads for seed sweeps (0 = all cores)")->capture_default_str();
    train->footer(
        "CSV: episode,return,lhs_error,rhs_bound,eps_q,w1,scheme,seed (rows grouped by seed).\n"
        "Unset ERE parameters scale with the run: L0=traj-len, eta=0.996^(1000/L0),\n"
        "c_min=5*L0, K=batches.");

    auto* verify = app.add_subcommand("verify", "run the property suites");
    add_common(verify, c, false);
    verify->add_option("--suite", c.suites, "suite to run (repeatable; default all)")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    verify->add_option("--inject-fault", c.inject_fault, "none | apx-sign")->capture_default_str();
    verify->add_flag("--list", c.list_suites, "list suite names");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*profile) return replaylab::cli::cmd_profile(c);
        if (*bound) return replaylab::cli::cmd_bound(c);
        if (*train) return replaylab::cli::cmd_train(c);
        if (*verify) return replaylab::cli::cmd_verify(c);
    } catch (const std::invalid_argument& ex) {  // ParameterError, OrderingError
        fmt::print(stderr, "error: {}\n", ex.what());
        return 1;
    } catch (const replaylab::NumericalError& ex) {
        fmt::print(stderr, "numerical error: {}\n", ex.what());
        return 2;
    } catch (const replaylab::SamplingError& ex) {
        fmt::print(stderr, "sampling error: {}\n", ex.what());
        return 2;
    }
    return 1;
}
