#include "commands.hpp"

#include "replaylab/analysis/bounds.hpp"
#include "replaylab/errors.hpp"
#include "replaylab/mdp/environments.hpp"
#include "replaylab/mdp/off_policy_loop.hpp"
#include "replaylab/replay/selection_sim.hpp"
#include "replaylab/verify/suites.hpp"
#include "replaylab/weighting/ere.hpp"
#include "replaylab/weighting/profile.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace replaylab::cli {

using weighting::SchemeKind;
using weighting::WeightScheme;

namespace {

class Provenance {
public:
    explicit Provenance(const char* subcommand) : line_(fmt::format("# replaylab {}", subcommand)) {}
    void add(const char* key, const std::string& value) { line_ += fmt::format(" --{}={}", key, value); }
    void add(const char* key, double value) { add(key, format_number(value)); }
    void add(const char* key, std::int64_t value) { add(key, std::to_string(value)); }
    void add(const char* key, std::uint64_t value) { add(key, std::to_string(value)); }
    void flag(const char* key, bool on) {
        if (on) line_ += fmt::format(" --{}", key);
    }
    std::string str() const { return line_ + '\n'; }

private:
    std::string line_;
};

WeightScheme resolve_scheme(const RunConfig& c, const WeightScheme& ere_defaults) {
    const auto kind = weighting::parse_scheme_kind(c.scheme);
    if (kind == SchemeKind::PriorityBaseline) return WeightScheme::priority(c.priority_exponent);
    if (!weighting::is_ere(kind)) {
        WeightScheme s;
        s.kind = kind;
        return s;
    }
    return WeightScheme::ere(kind, c.buffer_size.value_or(ere_defaults.buffer_size),
                             c.max_horizon.value_or(ere_defaults.max_horizon),
                             c.eta.value_or(ere_defaults.eta),
                             c.min_coverage.value_or(ere_defaults.min_coverage),
                             c.updates_per_episode.value_or(ere_defaults.updates_per_episode));
}

void add_scheme(Provenance& p, const WeightScheme& s) {
    p.add("scheme", std::string(weighting::to_string(s.kind)));
    if (weighting::is_ere(s.kind)) {
        p.add("buffer-size", s.buffer_size);
        p.add("max-horizon", s.max_horizon);
        p.add("eta", s.eta);
        p.add("min-coverage", s.min_coverage);
        p.add("updates-per-episode", s.updates_per_episode);
    } else if (s.kind == SchemeKind::PriorityBaseline) {
        p.add("priority-exponent", s.priority_exponent);
    }
}

std::optional<std::int64_t> parse_horizon(const std::string& text) {
    if (text == "inf" || text == "infinity") return std::nullopt;
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParameterError(fmt::format("horizon must be an integer or 'inf', got '{}'", text));
    }
}

std::optional<std::vector<double>> parse_weights(const std::string& text, std::int64_t episodes) {
    if (text == "none") return std::nullopt;
    std::vector<double> w;
    if (text == "equal") {
        w.assign(static_cast<std::size_t>(episodes), 1.0);
    } else if (text == "one-over-age") {
        for (std::int64_t e = 1; e <= episodes; ++e) w.push_back(1.0 / static_cast<double>(episodes - e + 1));
    } else {
        std::stringstream in(text);
        for (std::string item; std::getline(in, item, ',');) {
            try {
                std::size_t used = 0;
                w.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ParameterError(fmt::format("cannot read episode weight '{}'", item));
            }
        }
        if (static_cast<std::int64_t>(w.size()) != episodes)
            throw ParameterError(fmt::format("{} weights given for {} episodes", w.size(), episodes));
    }
    return w;
}

mdp::TrainConfig train_config(const RunConfig& c) {
    mdp::TrainConfig t;
    t.episodes = c.episodes;
    t.traj_len = c.traj_len;
    t.batches_per_episode = c.batches;
    t.batch_size = c.batch_size;
    t.learning_rate = c.learning_rate;
    t.tau_initial = c.tau_initial;
    t.tau_min = c.tau_min;
    t.tau_decay = c.tau_decay;
    t.delta = c.delta;
    t.eval_step = c.eval_step;
    if (c.eval_horizon > 0) t.eval_horizon = c.eval_horizon;
    t.exact_fit = c.exact_fit;
    t.weighted_bound = c.weighted_bound;
    t.validate();
    return t;
}

// The approximate ERE weight with the sign of its logarithmic term flipped.
double apx_with_flipped_log(const WeightScheme& s, std::int64_t age) {
    const double base = weighting::ere_apx_weight(s, age);
    if (age > s.min_coverage) return base;
    const double span = static_cast<double>(s.buffer_size) * std::pow(s.eta, static_cast<double>(s.max_horizon));
    const double log_term = std::max(std::log(static_cast<double>(s.min_coverage) / span), 0.0) /
                            static_cast<double>(s.min_coverage);
    return base - 2.0 * log_term;
}

}  // namespace

std::string profile_csv(const RunConfig& c) {
    const auto scheme = resolve_scheme(c, WeightScheme{});
    if (c.mc_trials < 0) throw ParameterError("mc-trials must be >= 0");
    const auto profile = weighting::expected_selection_profile(scheme, c.profile_horizon, c.batch, c.updates);

    Provenance p("profile");
    add_scheme(p, scheme);
    p.add("horizon", c.profile_horizon);
    p.add("batch", c.batch);
    p.add("updates", c.updates);
    p.add("mc-trials", c.mc_trials);
    p.add("seed", c.seed);

    std::optional<replay::MonteCarloProfile> mc;
    if (c.mc_trials > 0)
        mc = replay::monte_carlo_selection_profile(scheme, c.profile_horizon, c.batch, c.updates,
                                                   c.mc_trials, c.seed);
    const auto name = weighting::to_string(scheme.kind);
    fmt::memory_buffer out;
    fmt::format_to(std::back_inserter(out), "{}time_step,expected_count,scheme{}\n", p.str(),
                   mc ? ",mc_count,mc_stderr" : "");
    for (std::size_t k = 0; k < profile.expected_count.size(); ++k) {
        fmt::format_to(std::back_inserter(out), "{},{},{}", k + 1, profile.expected_count[k], name);
        if (mc) fmt::format_to(std::back_inserter(out), ",{},{}", mc->mean_count[k], mc->std_error[k]);
        out.push_back('\n');
    }
    return fmt::to_string(out);
}

std::string bound_report(const RunConfig& c) {
    analysis::BoundInputs in;
    in.r_max = c.r_max;
    in.gamma = c.gamma;
    in.lipschitz = c.lipschitz;
    in.diam = c.diam;
    in.delta = c.delta;
    in.episodes = c.bound_episodes;
    in.step = c.step;
    in.horizon = parse_horizon(c.bound_horizon);
    in.bellman_err = c.bellman_err;
    in.w1_err = c.w1_err;
    in.episode_weights = parse_weights(c.weights, c.bound_episodes);

    const char* form = "corollary1";
    analysis::BoundTerms t;
    if (in.episode_weights) {
        form = "corollary2";
        t = analysis::corollary2_weighted_terms(in);
    } else if (in.step == 0 && !in.horizon) {
        form = "theorem1";
        t = analysis::theorem1_terms(in);
    } else {
        t = analysis::corollary1_terms(in);
    }

    Provenance p("bound");
    p.add("r-max", c.r_max);
    p.add("gamma", c.gamma);
    p.add("lipschitz", c.lipschitz);
    p.add("diam", c.diam);
    p.add("delta", c.delta);
    p.add("episodes", c.bound_episodes);
    p.add("step", c.step);
    p.add("horizon", c.bound_horizon);
    p.add("bellman-err", c.bellman_err);
    p.add("w1-err", c.w1_err);
    p.add("weights", c.weights);
    return fmt::format(
        "{}form={}\nvariance_initial={}\nvariance_middle={}\ntruncation={}\nbellman={}\nmismatch={}\ntotal={}\n",
        p.str(), form, t.variance_initial, t.variance_middle, t.truncation, t.bellman, t.mismatch, t.total);
}

std::string train_csv(const RunConfig& c) {
    const auto env = mdp::environment_by_name(c.env);
    const auto cfg = train_config(c);
    const auto kind = weighting::parse_scheme_kind(c.scheme);
    auto defaults = mdp::training_scheme(weighting::is_ere(kind) ? kind : SchemeKind::EREApprox, cfg);
    const auto scheme = resolve_scheme(c, defaults);
    if (c.seeds < 1) throw ParameterError("seeds must be >= 1");

    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(c.seeds));
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = c.seed + k;
    const auto runs = mdp::run_seed_sweep(env, scheme, cfg, seeds, c.workers);

    Provenance p("train");
    p.add("env", c.env);
    add_scheme(p, scheme);
    p.add("episodes", c.episodes);
    p.add("traj-len", c.traj_len);
    p.add("batches", c.batches);
    p.add("batch-size", c.batch_size);
    p.add("lr", c.learning_rate);
    p.add("tau-initial", c.tau_initial);
    p.add("tau-min", c.tau_min);
    p.add("tau-decay", c.tau_decay);
    p.add("delta", c.delta);
    p.add("eval-step", c.eval_step);
    p.add("eval-horizon", c.eval_horizon);
    p.flag("exact-fit", c.exact_fit);
    p.flag("weighted-bound", c.weighted_bound);
    p.add("seed", c.seed);
    p.add("seeds", c.seeds);

    const auto name = weighting::to_string(scheme.kind);
    fmt::memory_buffer out;
    fmt::format_to(std::back_inserter(out), "{}episode,return,lhs_error,rhs_bound,eps_q,w1,scheme,seed\n", p.str());
    for (std::size_t k = 0; k < runs.size(); ++k)
        for (const auto& r : runs[k])
            fmt::format_to(std::back_inserter(out), "{},{},{},{},{},{},{},{}\n", r.episode, r.return_value,
                           r.lhs_error, r.rhs_bound, r.eps_q, r.w1, name, seeds[k]);
    return fmt::to_string(out);
}

void write_output(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParameterError(fmt::format("cannot write output file '{}'", path));
    out << text;
    out.close();
    if (!out) throw ParameterError(fmt::format("failed writing output file '{}'", path));
}

int cmd_profile(const RunConfig& c) {
    write_output(c.output, profile_csv(c));
    return 0;
}

int cmd_bound(const RunConfig& c) {
    write_output(c.output, bound_report(c));
    return 0;
}

int cmd_train(const RunConfig& c) {
    write_output(c.output, train_csv(c));
    return 0;
}

int cmd_verify(const RunConfig& c) {
    if (c.list_suites) {
        for (const auto& n : verify::suite_names()) fmt::print("{}\n", n);
        return 0;
    }
    verify::VerifyOptions opt;
    opt.seed = c.seed;
    if (c.inject_fault == "apx-sign")
        opt.ere_apx = apx_with_flipped_log;
    else if (c.inject_fault != "none")
        throw ParameterError(fmt::format("unknown fault '{}' (known: none, apx-sign)", c.inject_fault));

    const auto results = verify::run_suites(c.suites, opt);
    std::vector<std::string> failed;
    for (const auto& r : results) {
        fmt::print("suite={} status={} residual={:.6e} tolerance={:.1e} seconds={:.3f}\n  {}\n", r.name,
                   r.passed ? "pass" : "FAIL", r.residual, r.tolerance, r.seconds, r.detail);
        if (!r.passed) failed.push_back(r.name);
    }
    if (failed.empty()) {
        fmt::print("all {} suites passed\n", results.size());
        return 0;
    }
    fmt::print(stderr, "failed suites: {}\n", fmt::join(failed, ", "));
    return 3;
}

}  // namespace replaylab::cli
