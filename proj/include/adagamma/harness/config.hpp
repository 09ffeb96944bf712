#pragma once

#include <cstdlib>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "adagamma/env/corridor.hpp"
#include "adagamma/env/env.hpp"
#include "adagamma/env/pendulum.hpp"
#include "adagamma/gamma/settings.hpp"
#include "adagamma/ppo/agent.hpp"
#include "adagamma/sac/agent.hpp"

namespace adagamma::harness {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full experiment description: run plumbing, the algorithm sections with
/// their published defaults, and the shared gamma section. Algorithm choice
/// decides which gamma defaults apply before user overrides land on top.
struct RunConfig {
    // [run]
    std::string algorithm = "sac"; // sac | ppo
    std::string env = "pendulum";  // pendulum | corridor | tabular
    GammaVariant variant = GammaVariant::kAdaGammaRc;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    long max_steps = 1000000;
    long eval_interval = 10000;
    int eval_episodes = 10;
    std::string out_dir = "runs/out";
    // [env] (tabular generator only; the control tasks pin their constants)
    int tab_states = 10;
    int tab_actions = 3;
    double tab_sparsity = 0.2;
    double tab_reward_lo = -1.0;
    double tab_reward_hi = 1.0;
    double tab_gamma_lo = 0.2;
    double tab_gamma_hi = 0.9;
    // [sac] / [ppo]
    sac::Params sac;
    ppo::Params ppo;
    // [gamma] section, copied into the chosen algorithm's params when building
    GammaSettings gamma;

    bool gamma_section_touched = false; // whether user overrode any gamma key
};

inline GammaVariant parse_variant(const std::string& s) {
    if (s == "adagamma-rc") return GammaVariant::kAdaGammaRc;
    if (s == "cross-validated") return GammaVariant::kCrossValidated;
    if (s == "uncertainty") return GammaVariant::kUncertainty;
    if (s == "naive-td") return GammaVariant::kNaiveTd;
    if (s == "fixed") return GammaVariant::kFixed;
    throw ConfigError("unknown gamma variant '" + s + "'");
}

inline std::string variant_name(GammaVariant v) {
    switch (v) {
        case GammaVariant::kAdaGammaRc: return "adagamma-rc";
        case GammaVariant::kCrossValidated: return "cross-validated";
        case GammaVariant::kUncertainty: return "uncertainty";
        case GammaVariant::kNaiveTd: return "naive-td";
        case GammaVariant::kFixed: return "fixed";
    }
    return "adagamma-rc";
}

namespace detail {

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (...) {
        throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
    }
}

inline long to_long(const std::string& key, const std::string& v) {
    const double d = to_double(key, v);
    const long l = static_cast<long>(d);
    if (static_cast<double>(l) != d)
        throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
    return l;
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

inline std::vector<std::uint64_t> to_seeds(const std::string& key, const std::string& v) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(v);
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        out.push_back(static_cast<std::uint64_t>(to_long(key, part)));
    }
    if (out.empty()) throw ConfigError("key '" + key + "': empty seed list");
    return out;
}

inline void check_unit_interval(const std::string& key, double v, bool allow_one = false) {
    const bool ok = v >= 0.0 && (allow_one ? v <= 1.0 : v < 1.0);
    if (!ok)
        throw ConfigError("key '" + key + "': value " + std::to_string(v) + " outside [0,1" +
                          (allow_one ? "]" : ")"));
}

inline void check_positive(const std::string& key, double v) {
    if (!(v > 0.0)) throw ConfigError("key '" + key + "': must be positive");
}

inline void check_nonnegative(const std::string& key, double v) {
    if (!(v >= 0.0)) throw ConfigError("key '" + key + "': must be nonnegative");
}

} // namespace detail

/// Published defaults for the gamma section differ by adapter; the shared
/// struct starts SAC-flavored and switches when the algorithm says so.
inline GammaSettings default_gamma_for(const std::string& algorithm) {
    if (algorithm == "ppo") return ppo::default_ppo_gamma();
    return GammaSettings{};
}

namespace detail {

using KvTree = std::map<std::string, std::map<std::string, std::string>>;

inline KvTree parse_tree(std::istream& in) {
    KvTree tree;
    std::string line, section = "run";
    int lineno = 0;
    while (std::getline(in, line)) {
        lineno += 1;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            tree[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        tree[section][key] = value;
    }
    return tree;
}

/// Environment-variable overrides: ADAGAMMA_<SECTION>_<KEY>=value.
inline void apply_env_overrides(KvTree& tree, char** envp) {
    static const std::vector<std::string> sections{"RUN", "ENV", "SAC", "PPO", "GAMMA"};
    if (!envp) return;
    for (char** e = envp; *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("ADAGAMMA_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        const std::string name = entry.substr(9, eq - 9);
        const std::string value = entry.substr(eq + 1);
        for (const std::string& sec : sections) {
            if (name.rfind(sec + "_", 0) == 0) {
                std::string key = name.substr(sec.size() + 1);
                for (char& c : key) c = static_cast<char>(std::tolower(c));
                std::string section = sec;
                for (char& c : section) c = static_cast<char>(std::tolower(c));
                tree[section][key] = value;
                break;
            }
        }
    }
}

inline void apply_run(RunConfig& cfg, const std::string& key, const std::string& v) {
    if (key == "algorithm") {
        if (v != "sac" && v != "ppo") throw ConfigError("key 'algorithm': must be sac or ppo");
        cfg.algorithm = v;
    } else if (key == "env") {
        if (v != "pendulum" && v != "corridor" && v != "tabular")
            throw ConfigError("key 'env': must be pendulum, corridor, or tabular");
        cfg.env = v;
    } else if (key == "variant") {
        cfg.variant = parse_variant(v);
    } else if (key == "seeds") {
        cfg.seeds = to_seeds(key, v);
    } else if (key == "max_steps") {
        cfg.max_steps = to_long(key, v);
        check_positive(key, static_cast<double>(cfg.max_steps));
    } else if (key == "eval_interval") {
        cfg.eval_interval = to_long(key, v);
        check_positive(key, static_cast<double>(cfg.eval_interval));
    } else if (key == "eval_episodes") {
        cfg.eval_episodes = static_cast<int>(to_long(key, v));
        check_positive(key, cfg.eval_episodes);
    } else if (key == "out_dir") {
        cfg.out_dir = v;
    } else {
        throw ConfigError("unknown key '" + key + "' in section [run]");
    }
}

inline void apply_env_section(RunConfig& cfg, const std::string& key, const std::string& v) {
    if (key == "states") {
        cfg.tab_states = static_cast<int>(to_long(key, v));
        check_positive(key, cfg.tab_states);
    } else if (key == "actions") {
        cfg.tab_actions = static_cast<int>(to_long(key, v));
        check_positive(key, cfg.tab_actions);
    } else if (key == "sparsity") {
        cfg.tab_sparsity = to_double(key, v);
        check_unit_interval(key, cfg.tab_sparsity);
    } else if (key == "reward_lo") {
        cfg.tab_reward_lo = to_double(key, v);
    } else if (key == "reward_hi") {
        cfg.tab_reward_hi = to_double(key, v);
    } else if (key == "gamma_lo") {
        cfg.tab_gamma_lo = to_double(key, v);
        check_unit_interval(key, cfg.tab_gamma_lo);
    } else if (key == "gamma_hi") {
        cfg.tab_gamma_hi = to_double(key, v);
        check_unit_interval(key, cfg.tab_gamma_hi);
    } else {
        throw ConfigError("unknown key '" + key + "' in section [env]");
    }
}

inline void apply_sac(RunConfig& cfg, const std::string& key, const std::string& v) {
    sac::Params& p = cfg.sac;
    if (key == "hidden") {
        p.hidden = static_cast<int>(to_long(key, v));
        check_positive(key, p.hidden);
    } else if (key == "lr") {
        p.lr = to_double(key, v);
        check_positive(key, p.lr);
    } else if (key == "tau") {
        p.tau = to_double(key, v);
        check_unit_interval(key, p.tau, true);
    } else if (key == "replay_capacity") {
        p.replay_capacity = static_cast<std::size_t>(to_long(key, v));
        check_positive(key, static_cast<double>(p.replay_capacity));
    } else if (key == "min_buffer") {
        p.min_buffer = static_cast<std::size_t>(to_long(key, v));
        check_positive(key, static_cast<double>(p.min_buffer));
    } else if (key == "batch_size") {
        p.batch_size = static_cast<int>(to_long(key, v));
        check_positive(key, p.batch_size);
    } else if (key == "grad_steps_per_env_step") {
        p.grad_steps_per_env_step = static_cast<int>(to_long(key, v));
        check_positive(key, p.grad_steps_per_env_step);
    } else if (key == "alpha_init") {
        p.alpha_init = to_double(key, v);
        check_positive(key, p.alpha_init);
    } else if (key == "auto_alpha") {
        p.auto_alpha = to_bool(key, v);
    } else if (key == "target_entropy") {
        if (v != "auto") p.target_entropy = to_double(key, v);
    } else if (key == "max_grad_norm") {
        p.max_grad_norm = to_double(key, v);
        check_nonnegative(key, p.max_grad_norm);
    } else {
        throw ConfigError("unknown key '" + key + "' in section [sac]");
    }
}

inline void apply_ppo(RunConfig& cfg, const std::string& key, const std::string& v) {
    ppo::Params& p = cfg.ppo;
    if (key == "hidden") {
        p.hidden = static_cast<int>(to_long(key, v));
        check_positive(key, p.hidden);
    } else if (key == "actor_lr") {
        p.actor_lr = to_double(key, v);
        check_positive(key, p.actor_lr);
    } else if (key == "critic_lr") {
        p.critic_lr = to_double(key, v);
        check_positive(key, p.critic_lr);
    } else if (key == "clip") {
        p.clip = to_double(key, v);
        check_positive(key, p.clip);
    } else if (key == "gae_lambda") {
        p.gae_lambda = to_double(key, v);
        check_unit_interval(key, p.gae_lambda, true);
    } else if (key == "epochs") {
        p.epochs = static_cast<int>(to_long(key, v));
        check_positive(key, p.epochs);
    } else if (key == "rollout_steps") {
        p.rollout_steps = static_cast<int>(to_long(key, v));
        check_positive(key, p.rollout_steps);
    } else if (key == "minibatch") {
        p.minibatch = static_cast<int>(to_long(key, v));
        check_positive(key, p.minibatch);
    } else if (key == "entropy_coef") {
        p.entropy_coef = to_double(key, v);
        check_nonnegative(key, p.entropy_coef);
    } else if (key == "max_grad_norm") {
        p.max_grad_norm = to_double(key, v);
        check_nonnegative(key, p.max_grad_norm);
    } else if (key == "action_std_init") {
        p.action_std_init = to_double(key, v);
        check_positive(key, p.action_std_init);
    } else if (key == "action_std_floor") {
        p.action_std_floor = to_double(key, v);
        check_positive(key, p.action_std_floor);
    } else if (key == "action_std_decay") {
        p.action_std_decay = to_double(key, v);
        check_nonnegative(key, p.action_std_decay);
    } else if (key == "action_std_decay_period") {
        p.action_std_decay_period = to_long(key, v);
        check_positive(key, static_cast<double>(p.action_std_decay_period));
    } else if (key == "nstep_value_targets") {
        p.nstep_value_targets = to_bool(key, v);
    } else if (key == "normalize_before_value_targets") {
        p.normalize_before_value_targets = to_bool(key, v);
    } else {
        throw ConfigError("unknown key '" + key + "' in section [ppo]");
    }
}

inline void apply_gamma(RunConfig& cfg, const std::string& key, const std::string& v) {
    GammaSettings& g = cfg.gamma;
    cfg.gamma_section_touched = true;
    if (key == "gamma_min") {
        g.gamma_min = to_double(key, v);
        check_unit_interval(key, g.gamma_min);
    } else if (key == "gamma_max") {
        g.gamma_max = to_double(key, v);
        check_unit_interval(key, g.gamma_max);
    } else if (key == "init_value") {
        g.init_value = to_double(key, v);
        check_unit_interval(key, g.init_value);
    } else if (key == "fixed_value") {
        g.fixed_value = to_double(key, v);
        check_unit_interval(key, g.fixed_value);
    } else if (key == "hidden") {
        g.hidden = static_cast<int>(to_long(key, v));
        check_positive(key, g.hidden);
    } else if (key == "lr") {
        g.lr = to_double(key, v);
        check_positive(key, g.lr);
    } else if (key == "nstep") {
        g.nstep = static_cast<int>(to_long(key, v));
        check_positive(key, g.nstep);
    } else if (key == "warmup_steps") {
        g.warmup_steps = to_long(key, v);
        check_nonnegative(key, static_cast<double>(g.warmup_steps));
    } else if (key == "warmup_episodes") {
        g.warmup_episodes = to_long(key, v);
        check_nonnegative(key, static_cast<double>(g.warmup_episodes));
    } else if (key == "update_every") {
        g.update_every = static_cast<int>(to_long(key, v));
        check_positive(key, g.update_every);
    } else if (key == "lambda_rc") {
        g.weights.lambda_rc = to_double(key, v);
        check_nonnegative(key, g.weights.lambda_rc);
    } else if (key == "lambda_dev") {
        g.weights.lambda_dev = to_double(key, v);
        check_nonnegative(key, g.weights.lambda_dev);
    } else if (key == "lambda_var") {
        g.weights.lambda_var = to_double(key, v);
        check_nonnegative(key, g.weights.lambda_var);
    } else if (key == "lambda_bound") {
        g.weights.lambda_bound = to_double(key, v);
        check_nonnegative(key, g.weights.lambda_bound);
    } else if (key == "gamma_target") {
        if (v == "ref") {
            g.weights.anchor_to_ref = true;
        } else {
            g.weights.anchor_to_ref = false;
            g.weights.gamma_target = to_double(key, v);
            check_unit_interval(key, g.weights.gamma_target);
        }
    } else if (key == "boundary_margin") {
        g.boundary_margin = to_double(key, v);
        check_nonnegative(key, g.boundary_margin);
    } else if (key == "ref_init") {
        g.ref_init = to_double(key, v);
        check_unit_interval(key, g.ref_init);
    } else if (key == "ref_tau") {
        g.ref_tau = to_double(key, v);
        check_unit_interval(key, g.ref_tau, true);
    } else if (key == "ref_period") {
        g.ref_period = static_cast<int>(to_long(key, v));
        check_positive(key, g.ref_period);
    } else if (key == "ref_adaptive") {
        g.ref_adaptive = to_bool(key, v);
    } else if (key == "rc_fresh_action") {
        g.rc_fresh_action = to_bool(key, v);
    } else if (key == "unc_eta") {
        g.unc_eta = to_double(key, v);
        check_positive(key, g.unc_eta);
    } else if (key == "unc_beta_init") {
        g.unc_beta_init = to_double(key, v);
    } else if (key == "unc_beta_lr") {
        g.unc_beta_lr = to_double(key, v);
        check_nonnegative(key, g.unc_beta_lr);
    } else if (key == "unc_base") {
        g.unc_base = to_double(key, v);
        check_unit_interval(key, g.unc_base);
    } else {
        throw ConfigError("unknown key '" + key + "' in section [gamma]");
    }
}

} // namespace detail

/// Parses a sectioned key=value tree into a validated RunConfig. Unknown
/// keys are rejected by name; numeric ranges are checked on assignment and
/// cross-field constraints afterwards.
inline RunConfig load_config_stream(std::istream& in, char** envp = nullptr) {
    detail::KvTree tree = detail::parse_tree(in);
    detail::apply_env_overrides(tree, envp);

    RunConfig cfg;
    // algorithm first: it selects the gamma-section defaults
    if (auto run = tree.find("run"); run != tree.end()) {
        if (auto alg = run->second.find("algorithm"); alg != run->second.end())
            detail::apply_run(cfg, "algorithm", alg->second);
    }
    cfg.gamma = default_gamma_for(cfg.algorithm);

    for (const auto& [section, kv] : tree) {
        for (const auto& [key, value] : kv) {
            if (section == "run") {
                detail::apply_run(cfg, key, value);
            } else if (section == "env") {
                detail::apply_env_section(cfg, key, value);
            } else if (section == "sac") {
                detail::apply_sac(cfg, key, value);
            } else if (section == "ppo") {
                detail::apply_ppo(cfg, key, value);
            } else if (section == "gamma") {
                detail::apply_gamma(cfg, key, value);
            } else {
                throw ConfigError("unknown section [" + section + "]");
            }
        }
    }

    if (cfg.gamma.gamma_min > cfg.gamma.gamma_max)
        throw ConfigError("key 'gamma_min': must not exceed gamma_max");
    if (cfg.gamma.gamma_min != cfg.gamma.gamma_max &&
        !(cfg.gamma.init_value > cfg.gamma.gamma_min &&
          cfg.gamma.init_value < cfg.gamma.gamma_max))
        throw ConfigError("key 'init_value': must lie strictly inside the gamma bounds");
    if (cfg.tab_gamma_lo > cfg.tab_gamma_hi)
        throw ConfigError("key 'gamma_lo': must not exceed gamma_hi");
    if (cfg.env == "tabular" && (cfg.algorithm == "sac" || cfg.algorithm == "ppo"))
        throw ConfigError("env 'tabular' drives the theory lab, not agent training");

    cfg.sac.gamma = cfg.gamma;
    cfg.sac.gamma.variant = cfg.variant;
    cfg.ppo.gamma = cfg.gamma;
    cfg.ppo.gamma.variant = cfg.variant;
    return cfg;
}

inline RunConfig load_config(const std::string& path, char** envp = nullptr) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return load_config_stream(in, envp);
}

/// Canonical echo of the effective configuration: every key, current value.
/// load(echo(load(x))) == load(x).
inline std::string effective_config_text(const RunConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[run]\n";
    out << "algorithm = " << cfg.algorithm << '\n';
    out << "env = " << cfg.env << '\n';
    out << "variant = " << variant_name(cfg.variant) << '\n';
    out << "seeds = ";
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i)
        out << (i ? "," : "") << cfg.seeds[i];
    out << '\n';
    out << "max_steps = " << cfg.max_steps << '\n';
    out << "eval_interval = " << cfg.eval_interval << '\n';
    out << "eval_episodes = " << cfg.eval_episodes << '\n';
    out << "out_dir = " << cfg.out_dir << '\n';

    out << "\n[env]\n";
    out << "states = " << cfg.tab_states << '\n';
    out << "actions = " << cfg.tab_actions << '\n';
    out << "sparsity = " << cfg.tab_sparsity << '\n';
    out << "reward_lo = " << cfg.tab_reward_lo << '\n';
    out << "reward_hi = " << cfg.tab_reward_hi << '\n';
    out << "gamma_lo = " << cfg.tab_gamma_lo << '\n';
    out << "gamma_hi = " << cfg.tab_gamma_hi << '\n';

    const sac::Params& s = cfg.sac;
    out << "\n[sac]\n";
    out << "hidden = " << s.hidden << '\n';
    out << "lr = " << s.lr << '\n';
    out << "tau = " << s.tau << '\n';
    out << "replay_capacity = " << s.replay_capacity << '\n';
    out << "min_buffer = " << s.min_buffer << '\n';
    out << "batch_size = " << s.batch_size << '\n';
    out << "grad_steps_per_env_step = " << s.grad_steps_per_env_step << '\n';
    out << "alpha_init = " << s.alpha_init << '\n';
    out << "auto_alpha = " << (s.auto_alpha ? "true" : "false") << '\n';
    out << "target_entropy = ";
    if (s.target_entropy) out << *s.target_entropy << '\n';
    else out << "auto\n";
    out << "max_grad_norm = " << s.max_grad_norm << '\n';

    const ppo::Params& p = cfg.ppo;
    out << "\n[ppo]\n";
    out << "hidden = " << p.hidden << '\n';
    out << "actor_lr = " << p.actor_lr << '\n';
    out << "critic_lr = " << p.critic_lr << '\n';
    out << "clip = " << p.clip << '\n';
    out << "gae_lambda = " << p.gae_lambda << '\n';
    out << "epochs = " << p.epochs << '\n';
    out << "rollout_steps = " << p.rollout_steps << '\n';
    out << "minibatch = " << p.minibatch << '\n';
    out << "entropy_coef = " << p.entropy_coef << '\n';
    out << "max_grad_norm = " << p.max_grad_norm << '\n';
    out << "action_std_init = " << p.action_std_init << '\n';
    out << "action_std_floor = " << p.action_std_floor << '\n';
    out << "action_std_decay = " << p.action_std_decay << '\n';
    out << "action_std_decay_period = " << p.action_std_decay_period << '\n';
    out << "nstep_value_targets = " << (p.nstep_value_targets ? "true" : "false") << '\n';
    out << "normalize_before_value_targets = "
        << (p.normalize_before_value_targets ? "true" : "false") << '\n';

    const GammaSettings& g = cfg.gamma;
    out << "\n[gamma]\n";
    out << "gamma_min = " << g.gamma_min << '\n';
    out << "gamma_max = " << g.gamma_max << '\n';
    out << "init_value = " << g.init_value << '\n';
    out << "fixed_value = " << g.fixed_value << '\n';
    out << "hidden = " << g.hidden << '\n';
    out << "lr = " << g.lr << '\n';
    out << "nstep = " << g.nstep << '\n';
    out << "warmup_steps = " << g.warmup_steps << '\n';
    out << "warmup_episodes = " << g.warmup_episodes << '\n';
    out << "update_every = " << g.update_every << '\n';
    out << "lambda_rc = " << g.weights.lambda_rc << '\n';
    out << "lambda_dev = " << g.weights.lambda_dev << '\n';
    out << "lambda_var = " << g.weights.lambda_var << '\n';
    out << "lambda_bound = " << g.weights.lambda_bound << '\n';
    out << "gamma_target = ";
    if (g.weights.anchor_to_ref) out << "ref\n";
    else out << g.weights.gamma_target << '\n';
    out << "boundary_margin = " << g.boundary_margin << '\n';
    out << "ref_init = " << g.ref_init << '\n';
    out << "ref_tau = " << g.ref_tau << '\n';
    out << "ref_period = " << g.ref_period << '\n';
    out << "ref_adaptive = " << (g.ref_adaptive ? "true" : "false") << '\n';
    out << "rc_fresh_action = " << (g.rc_fresh_action ? "true" : "false") << '\n';
    out << "unc_eta = " << g.unc_eta << '\n';
    out << "unc_beta_init = " << g.unc_beta_init << '\n';
    out << "unc_beta_lr = " << g.unc_beta_lr << '\n';
    out << "unc_base = " << g.unc_base << '\n';
    return out.str();
}

inline std::unique_ptr<Env> make_env(const RunConfig& cfg) {
    if (cfg.env == "pendulum") return std::make_unique<PendulumEnv>();
    if (cfg.env == "corridor") return std::make_unique<CorridorEnv>();
    throw ConfigError("env '" + cfg.env + "' has no step interface");
}

} // namespace adagamma::harness
