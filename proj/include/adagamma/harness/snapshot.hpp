#pragma once

#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>

#include "adagamma/gamma/gamma_net.hpp"
#include "adagamma/ppo/agent.hpp"
#include "adagamma/sac/agent.hpp"

namespace adagamma::harness {

/// Final-state snapshot of a trained agent: enough to act, to evaluate the
/// active discount source, and to round-trip exactly (raw little-endian
/// float64 parameters).
struct Snapshot {
    std::string algorithm; // "sac" | "ppo"
    int obs = 0;
    int act = 0;
    double act_low = -1.0;
    double act_high = 1.0;
    GammaVariant variant = GammaVariant::kFixed;
    double gamma_min = 0.9;
    double gamma_max = 0.999;
    double boundary_margin = 0.005;
    double init_value = 0.98;
    double fixed_value = 0.99;
    double alpha = 0.2;      // sac temperature
    double action_std = 0.1; // ppo exploration std
    double unc_beta = 2.0;
    double unc_eta = 1.0;
    double unc_base = 0.99;
    std::map<std::string, Mlp> nets;

    bool has(const std::string& name) const { return nets.count(name) > 0; }

    /// Stochastic action under the stored policy (visitation sampling).
    Vec act_stochastic(const Vec& s, Rng& rng) const {
        const Mlp& policy = nets.at("policy");
        const Vec head = policy.forward(s);
        if (algorithm == "sac") {
            Vec noise(act);
            for (double& v : noise) v = rng.normal();
            return sac::squash_sample(head.data(), noise.data(), act,
                                      (act_high + act_low) / 2.0, (act_high - act_low) / 2.0)
                .action_env;
        }
        Vec a(act);
        for (int j = 0; j < act; ++j) a[j] = head[j] + action_std * rng.normal();
        return a;
    }

    /// The discount this agent would assign to (s, a).
    double gamma_of(const Vec& s, const Vec& a_env) const {
        switch (variant) {
            case GammaVariant::kFixed:
                return fixed_value;
            case GammaVariant::kUncertainty: {
                UncertaintyGamma u;
                u.beta = unc_beta;
                u.eta = unc_eta;
                u.gamma_min = gamma_min;
                u.gamma_max = gamma_max;
                double disagreement = 0.0;
                if (algorithm == "sac") {
                    Vec sa(obs + act);
                    for (int j = 0; j < obs; ++j) sa[j] = s[j];
                    for (int j = 0; j < act; ++j) sa[obs + j] = a_env[j];
                    disagreement = std::abs(nets.at("q1").forward(sa)[0] -
                                            nets.at("q2").forward(sa)[0]);
                } else {
                    disagreement = std::abs(nets.at("value").forward(s)[0] -
                                            nets.at("aux_value").forward(s)[0]);
                }
                return u(disagreement);
            }
            default: {
                const Mlp& g = nets.at("gamma");
                const double logit = g.forward(s)[0];
                return gamma_min + (gamma_max - gamma_min) * sigmoid(logit);
            }
        }
    }
};

namespace detail {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_i32(std::ostream& out, std::int32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
inline void write_str(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}
inline std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
inline std::int32_t read_i32(std::istream& in) {
    std::int32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
inline double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
}
inline std::string read_str(std::istream& in) {
    const std::uint32_t n = read_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

constexpr char kMagic[8] = {'A', 'D', 'A', 'G', 'S', 'N', 'P', '1'};

} // namespace detail

inline void save_snapshot(const std::string& path, const Snapshot& snap) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("save_snapshot: cannot open " + path);
    out.write(detail::kMagic, 8);
    detail::write_str(out, snap.algorithm);
    detail::write_i32(out, snap.obs);
    detail::write_i32(out, snap.act);
    detail::write_f64(out, snap.act_low);
    detail::write_f64(out, snap.act_high);
    detail::write_u32(out, static_cast<std::uint32_t>(snap.variant));
    detail::write_f64(out, snap.gamma_min);
    detail::write_f64(out, snap.gamma_max);
    detail::write_f64(out, snap.boundary_margin);
    detail::write_f64(out, snap.init_value);
    detail::write_f64(out, snap.fixed_value);
    detail::write_f64(out, snap.alpha);
    detail::write_f64(out, snap.action_std);
    detail::write_f64(out, snap.unc_beta);
    detail::write_f64(out, snap.unc_eta);
    detail::write_f64(out, snap.unc_base);
    detail::write_u32(out, static_cast<std::uint32_t>(snap.nets.size()));
    for (const auto& [name, net] : snap.nets) {
        detail::write_str(out, name);
        detail::write_i32(out, net.input_size());
        detail::write_i32(out, net.hidden_size());
        detail::write_i32(out, net.hidden2_size());
        detail::write_i32(out, net.output_size());
        detail::write_u32(out, static_cast<std::uint32_t>(net.param_count()));
        out.write(reinterpret_cast<const char*>(net.params().data()),
                  static_cast<std::streamsize>(net.param_count() * sizeof(double)));
    }
    if (!out) throw std::runtime_error("save_snapshot: write failed for " + path);
}

inline Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_snapshot: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, detail::kMagic, 8) != 0)
        throw std::runtime_error("load_snapshot: bad magic in " + path);
    Snapshot snap;
    snap.algorithm = detail::read_str(in);
    snap.obs = detail::read_i32(in);
    snap.act = detail::read_i32(in);
    snap.act_low = detail::read_f64(in);
    snap.act_high = detail::read_f64(in);
    snap.variant = static_cast<GammaVariant>(detail::read_u32(in));
    snap.gamma_min = detail::read_f64(in);
    snap.gamma_max = detail::read_f64(in);
    snap.boundary_margin = detail::read_f64(in);
    snap.init_value = detail::read_f64(in);
    snap.fixed_value = detail::read_f64(in);
    snap.alpha = detail::read_f64(in);
    snap.action_std = detail::read_f64(in);
    snap.unc_beta = detail::read_f64(in);
    snap.unc_eta = detail::read_f64(in);
    snap.unc_base = detail::read_f64(in);
    const std::uint32_t count = detail::read_u32(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::string name = detail::read_str(in);
        const int nin = detail::read_i32(in);
        const int h1 = detail::read_i32(in);
        const int h2 = detail::read_i32(in);
        const int nout = detail::read_i32(in);
        const std::uint32_t pc = detail::read_u32(in);
        Mlp net(nin, h1, h2, nout);
        if (net.param_count() != pc)
            throw std::runtime_error("load_snapshot: parameter count mismatch for net " + name);
        in.read(reinterpret_cast<char*>(net.params().data()),
                static_cast<std::streamsize>(pc * sizeof(double)));
        snap.nets.emplace(name, std::move(net));
    }
    if (!in) throw std::runtime_error("load_snapshot: truncated file " + path);
    return snap;
}

inline Snapshot make_snapshot(const sac::Agent& agent, double act_low, double act_high) {
    Snapshot snap;
    snap.algorithm = "sac";
    snap.obs = agent.obs_size();
    snap.act = agent.action_size();
    snap.act_low = act_low;
    snap.act_high = act_high;
    const GammaSettings& g = agent.params().gamma;
    snap.variant = g.variant;
    snap.gamma_min = g.gamma_min;
    snap.gamma_max = g.gamma_max;
    snap.boundary_margin = g.boundary_margin;
    snap.init_value = g.init_value;
    snap.fixed_value = g.fixed_value;
    snap.alpha = agent.alpha();
    snap.unc_beta = agent.uncertainty().beta;
    snap.unc_eta = g.unc_eta;
    snap.unc_base = g.unc_base;
    snap.nets.emplace("policy", agent.policy());
    snap.nets.emplace("q1", agent.q1());
    snap.nets.emplace("q2", agent.q2());
    if (agent.gamma_net()) snap.nets.emplace("gamma", agent.gamma_net()->net());
    return snap;
}

inline Snapshot make_snapshot(const ppo::Agent& agent, double act_low, double act_high) {
    Snapshot snap;
    snap.algorithm = "ppo";
    snap.obs = agent.obs_size();
    snap.act = agent.action_size();
    snap.act_low = act_low;
    snap.act_high = act_high;
    const GammaSettings& g = agent.params().gamma;
    snap.variant = g.variant;
    snap.gamma_min = g.gamma_min;
    snap.gamma_max = g.gamma_max;
    snap.boundary_margin = g.boundary_margin;
    snap.init_value = g.init_value;
    snap.fixed_value = g.fixed_value;
    snap.action_std = agent.action_std();
    snap.unc_beta = agent.uncertainty().beta;
    snap.unc_eta = g.unc_eta;
    snap.unc_base = g.unc_base;
    snap.nets.emplace("policy", agent.policy());
    snap.nets.emplace("value", agent.value_net());
    if (agent.aux_value_net()) snap.nets.emplace("aux_value", *agent.aux_value_net());
    if (agent.gamma_net()) snap.nets.emplace("gamma", agent.gamma_net()->net());
    return snap;
}

} // namespace adagamma::harness
