#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace adagamma {

/// One metrics record. Gamma diagnostics describe the active gamma source;
/// the four loss terms are the raw (unweighted) objective components from
/// the most recent gamma update, zero when the variant does not train one.
struct LogRow {
    long step = 0;
    long episode = 0;
    double eval_return_mean = 0.0;
    double eval_return_std = 0.0;
    double mean_gamma = 0.0;
    double min_gamma = 0.0;
    double max_gamma = 0.0;
    double gamma_loss_rc = 0.0;
    double gamma_loss_dev = 0.0;
    double gamma_loss_var = 0.0;
    double gamma_loss_bound = 0.0;
    double critic_loss = 0.0;
    double policy_loss = 0.0;
    double alpha = 0.0;
    double gamma_ref = 0.0;
};

/// Append-only CSV log: one header line, floats at 9 significant digits,
/// flushed after every row so a crashed run still parses to its last
/// complete record. Rows are also kept in memory for aggregation.
class RunLog {
public:
    static constexpr const char* kHeader =
        "step,episode,eval_return_mean,eval_return_std,mean_gamma,min_gamma,max_gamma,"
        "gamma_loss_rc,gamma_loss_dev,gamma_loss_var,gamma_loss_bound,"
        "critic_loss,policy_loss,alpha,gamma_ref";

    RunLog() = default;

    explicit RunLog(const std::string& path) : path_(path) {
        if (path_.empty()) return;
        file_.open(path_, std::ios::trunc);
        if (!file_) throw std::runtime_error("RunLog: cannot open " + path_);
        file_ << kHeader << '\n';
        file_.flush();
    }

    void append(const LogRow& row) {
        if (!rows_.empty() && row.step <= rows_.back().step)
            throw std::logic_error("RunLog: steps must be strictly increasing");
        rows_.push_back(row);
        if (file_) {
            file_ << format_row(row) << '\n';
            file_.flush();
        }
    }

    const std::vector<LogRow>& rows() const { return rows_; }
    const std::string& path() const { return path_; }

    static std::string format_row(const LogRow& r) {
        char buf[512];
        std::snprintf(buf, sizeof(buf),
                      "%ld,%ld,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g",
                      r.step, r.episode, r.eval_return_mean, r.eval_return_std, r.mean_gamma,
                      r.min_gamma, r.max_gamma, r.gamma_loss_rc, r.gamma_loss_dev,
                      r.gamma_loss_var, r.gamma_loss_bound, r.critic_loss, r.policy_loss,
                      r.alpha, r.gamma_ref);
        return buf;
    }

    /// Parses a log file, ignoring a trailing partial line.
    static std::vector<LogRow> parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("RunLog: cannot read " + path);
        std::string line;
        if (!std::getline(in, line) || line != kHeader)
            throw std::runtime_error("RunLog: bad or missing header in " + path);
        std::vector<LogRow> rows;
        while (std::getline(in, line)) {
            LogRow r;
            if (!parse_row(line, r)) break; // partial tail record
            rows.push_back(r);
        }
        return rows;
    }

    static bool parse_row(const std::string& line, LogRow& out) {
        std::istringstream ss(line);
        std::string field;
        double vals[15];
        for (int i = 0; i < 15; ++i) {
            if (!std::getline(ss, field, ',') || field.empty()) return false;
            try {
                vals[i] = std::stod(field);
            } catch (...) {
                return false;
            }
        }
        out.step = static_cast<long>(vals[0]);
        out.episode = static_cast<long>(vals[1]);
        out.eval_return_mean = vals[2];
        out.eval_return_std = vals[3];
        out.mean_gamma = vals[4];
        out.min_gamma = vals[5];
        out.max_gamma = vals[6];
        out.gamma_loss_rc = vals[7];
        out.gamma_loss_dev = vals[8];
        out.gamma_loss_var = vals[9];
        out.gamma_loss_bound = vals[10];
        out.critic_loss = vals[11];
        out.policy_loss = vals[12];
        out.alpha = vals[13];
        out.gamma_ref = vals[14];
        return true;
    }

private:
    std::string path_;
    std::ofstream file_;
    std::vector<LogRow> rows_;
};

} // namespace adagamma
