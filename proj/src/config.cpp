#include "usp/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace usp {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config field '" + key + "': expected a number, got '" + value + "'");
    }
}

long long parse_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw std::invalid_argument("config field '" + key + "': expected an integer, got '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw std::invalid_argument("config field '" + key + "': expected a boolean, got '" + value + "'");
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& item : split(value, ',')) {
        if (!item.empty()) out.push_back(parse_double(key, item));
    }
    if (out.empty()) throw std::invalid_argument("config field '" + key + "': empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
    std::vector<int> out;
    for (const auto& item : split(value, ',')) {
        if (!item.empty()) out.push_back(static_cast<int>(parse_int(key, item)));
    }
    if (out.empty()) throw std::invalid_argument("config field '" + key + "': empty list");
    return out;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

const char* to_string(SystemKind k) {
    return k == SystemKind::single_qubit ? "single" : "two";
}

const char* to_string(TargetKind k) {
    switch (k) {
        case TargetKind::zero: return "zero";
        case TargetKind::one: return "one";
        case TargetKind::bell: return "bell";
        default: return "custom";
    }
}

int RunConfig::action_count() const {
    const int n = static_cast<int>(agent.allowed_actions.size());
    return system == SystemKind::single_qubit ? n : n * n;
}

StateVector target_state_for(SystemKind system, TargetKind target) {
    if (system == SystemKind::single_qubit) {
        StateVector s = StateVector::Zero(2);
        switch (target) {
            case TargetKind::zero: s(0) = 1.0; return s;
            case TargetKind::one: s(1) = 1.0; return s;
            default: throw std::invalid_argument("single-qubit built-in targets are 'zero' and 'one'");
        }
    }
    if (target != TargetKind::bell) {
        throw std::invalid_argument("two-qubit built-in target is 'bell'");
    }
    StateVector s = StateVector::Zero(4);
    s(0) = s(3) = 1.0 / std::sqrt(2.0);
    return s;
}

double parse_duration(const std::string& text) {
    const std::string t = trim(text);
    const auto pi_pos = t.find("pi");
    if (pi_pos == std::string::npos) {
        return parse_double("duration", t);
    }
    const std::string coeff = trim(t.substr(0, pi_pos));
    double v = coeff.empty() ? M_PI : parse_double("duration", coeff) * M_PI;
    const std::string rest = trim(t.substr(pi_pos + 2));
    if (!rest.empty()) {
        if (rest.front() != '/') throw std::invalid_argument("bad duration '" + text + "'");
        v /= parse_double("duration", trim(rest.substr(1)));
    }
    return v;
}

RunConfig default_config(SystemKind system, TargetKind target) {
    RunConfig cfg;
    cfg.system = system;
    cfg.target = target;
    AgentConfig& a = cfg.agent;
    if (system == SystemKind::single_qubit) {
        a.allowed_actions = {0, 1, 2, 3};
        a.points_for_training = 32;
        a.points_for_testing = 320;
        a.batch_size = 32;
        a.memory_size = (target == TargetKind::one) ? 3000 : 2000;
        a.learning_rate = 1e-4;
        a.replace_period = 250;
        a.hidden_layers = {20, 20};
        a.epsilon_increment = (target == TargetKind::one) ? 1e-4 : 1e-3;
        a.max_steps_per_episode = 40;
        a.total_time = M_PI;
    } else {
        a.allowed_actions = {1, 2, 3, 4, 5};
        a.points_for_training = 126;
        a.points_for_testing = 6786;
        a.batch_size = 320;
        a.memory_size = 100000;
        a.learning_rate = 1e-6;
        a.replace_period = 200;
        a.hidden_layers = {300, 400, 200};
        a.epsilon_increment = 1.0 / 36000.0;
        a.max_steps_per_episode = 400;
        a.total_time = 10.0 * M_PI;
    }
    a.max_reward = 5000.0;
    a.discount_factor = 0.9;
    a.epsilon_max = 0.99;
    a.epsilon_testing = 1.0;
    a.episodes_per_training_point = 100;
    a.action_duration = M_PI / 40.0;
    a.success_threshold = 0.99;
    if (target != TargetKind::custom) {
        cfg.target_state = target_state_for(system, target);
    }
    return cfg;
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
    AgentConfig& a = cfg.agent;
    if (key == "system") {
        if (value == "single") cfg.system = SystemKind::single_qubit;
        else if (value == "two") cfg.system = SystemKind::two_qubit;
        else throw std::invalid_argument("config field 'system': expected single|two, got '" + value + "'");
    } else if (key == "target") {
        if (value == "zero") cfg.target = TargetKind::zero;
        else if (value == "one") cfg.target = TargetKind::one;
        else if (value == "bell") cfg.target = TargetKind::bell;
        else if (value == "custom") cfg.target = TargetKind::custom;
        else throw std::invalid_argument("config field 'target': expected zero|one|bell|custom, got '" + value + "'");
    } else if (key == "target_state") {
        const auto reals = parse_double_list(key, value);
        if (reals.size() != 4 && reals.size() != 8) {
            throw std::invalid_argument("config field 'target_state': expected 4 or 8 comma-separated reals (re,im pairs)");
        }
        StateVector s(static_cast<Eigen::Index>(reals.size() / 2));
        for (Eigen::Index i = 0; i < s.size(); ++i) {
            s(i) = Complexd(reals[static_cast<std::size_t>(2 * i)], reals[static_cast<std::size_t>(2 * i + 1)]);
        }
        const double n = s.norm();
        if (n < 1e-12) throw std::invalid_argument("config field 'target_state': zero norm");
        cfg.target_state = s / n;
        cfg.target = TargetKind::custom;
    } else if (key == "allowed_actions") {
        a.allowed_actions = parse_double_list(key, value);
    } else if (key == "points_for_training") {
        a.points_for_training = static_cast<int>(parse_int(key, value));
    } else if (key == "points_for_testing") {
        a.points_for_testing = static_cast<int>(parse_int(key, value));
    } else if (key == "batch_size") {
        a.batch_size = static_cast<int>(parse_int(key, value));
    } else if (key == "memory_size") {
        a.memory_size = static_cast<int>(parse_int(key, value));
    } else if (key == "learning_rate") {
        a.learning_rate = parse_double(key, value);
    } else if (key == "replace_period") {
        a.replace_period = static_cast<int>(parse_int(key, value));
    } else if (key == "max_reward") {
        a.max_reward = parse_double(key, value);
    } else if (key == "discount_factor") {
        a.discount_factor = parse_double(key, value);
    } else if (key == "hidden_layers") {
        a.hidden_layers = parse_int_list(key, value);
    } else if (key == "activation") {
        if (value != "relu" && value != "Relu" && value != "ReLU") {
            throw std::invalid_argument("config field 'activation': only 'relu' is supported");
        }
    } else if (key == "epsilon_increment") {
        a.epsilon_increment = parse_double(key, value);
    } else if (key == "epsilon_max") {
        a.epsilon_max = parse_double(key, value);
    } else if (key == "epsilon_testing") {
        a.epsilon_testing = parse_double(key, value);
    } else if (key == "max_steps_per_episode") {
        a.max_steps_per_episode = static_cast<int>(parse_int(key, value));
    } else if (key == "episodes_per_training_point") {
        a.episodes_per_training_point = static_cast<int>(parse_int(key, value));
    } else if (key == "total_time") {
        a.total_time = parse_duration(value);
    } else if (key == "action_duration") {
        a.action_duration = parse_duration(value);
    } else if (key == "success_threshold") {
        a.success_threshold = parse_double(key, value);
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else if (key == "eval_subsample") {
        cfg.eval_subsample = static_cast<int>(parse_int(key, value));
    } else if (key == "histogram_bins") {
        cfg.histogram_bins = static_cast<int>(parse_int(key, value));
    } else if (key == "noise_amplitudes") {
        cfg.noise.amplitudes = parse_double_list(key, value);
    } else if (key == "noise_realizations") {
        cfg.noise.realizations = static_cast<int>(parse_int(key, value));
    } else if (key == "noise_recompute_j12") {
        cfg.noise.recompute_j12 = parse_bool(key, value);
    } else if (key == "grape_step_size") {
        cfg.grape.step_size = parse_double(key, value);
    } else if (key == "grape_max_iterations") {
        cfg.grape.max_iterations = static_cast<int>(parse_int(key, value));
    } else if (key == "grape_tolerance") {
        cfg.grape.tolerance = parse_double(key, value);
    } else if (key == "grape_restarts") {
        cfg.grape.restarts = static_cast<int>(parse_int(key, value));
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "jobs") {
        cfg.jobs = static_cast<int>(parse_int(key, value));
    } else {
        throw std::invalid_argument("unknown config field '" + key + "'");
    }
}

void finalize_config(RunConfig& cfg) {
    AgentConfig& a = cfg.agent;
    if (cfg.target_state.size() == 0) {
        cfg.target_state = target_state_for(cfg.system, cfg.target);
    }
    if (cfg.target_state.size() != cfg.state_dim()) {
        throw std::invalid_argument("config: target_state dimension does not match the chosen system");
    }
    check_state(cfg.target_state);

    if (a.allowed_actions.empty()) throw std::invalid_argument("config: allowed_actions must be nonempty");
    for (double j : a.allowed_actions) {
        if (!std::isfinite(j)) throw std::invalid_argument("config: allowed_actions must be finite");
        if (cfg.system == SystemKind::single_qubit && j < 0.0) {
            throw std::invalid_argument("config: single-qubit pulse values must be non-negative");
        }
        if (cfg.system == SystemKind::two_qubit && j <= 0.0) {
            throw std::invalid_argument("config: two-qubit pulse values must be positive");
        }
    }
    if (!std::is_sorted(a.allowed_actions.begin(), a.allowed_actions.end())) {
        throw std::invalid_argument("config: allowed_actions must be sorted ascending");
    }
    if (a.discount_factor < 0.0 || a.discount_factor > 1.0) {
        throw std::invalid_argument("config field 'discount_factor': must lie in [0, 1]");
    }
    if (a.action_duration <= 0.0) throw std::invalid_argument("config field 'action_duration': must be positive");
    const double steps = a.total_time / a.action_duration;
    if (std::abs(steps - a.max_steps_per_episode) > 1e-6) {
        throw std::invalid_argument("config: max_steps_per_episode must equal total_time / action_duration");
    }
    if (a.batch_size < 1) throw std::invalid_argument("config field 'batch_size': must be >= 1");
    if (a.memory_size < 1) throw std::invalid_argument("config field 'memory_size': must be >= 1");
    if (a.replace_period < 1) throw std::invalid_argument("config field 'replace_period': must be >= 1");
    if (a.epsilon_increment < 0.0) throw std::invalid_argument("config field 'epsilon_increment': must be >= 0");
    if (a.epsilon_max < 0.0 || a.epsilon_max >= 1.0) {
        throw std::invalid_argument("config field 'epsilon_max': must lie in [0, 1)");
    }
    if (a.epsilon_testing < 0.0 || a.epsilon_testing > 1.0) {
        throw std::invalid_argument("config field 'epsilon_testing': must lie in [0, 1]");
    }
    if (a.success_threshold <= 0.0 || a.success_threshold > 1.0) {
        throw std::invalid_argument("config field 'success_threshold': must lie in (0, 1]");
    }
    if (a.hidden_layers.empty()) throw std::invalid_argument("config field 'hidden_layers': must be nonempty");
    for (int w : a.hidden_layers) {
        if (w < 1) throw std::invalid_argument("config field 'hidden_layers': widths must be >= 1");
    }
    if (a.episodes_per_training_point < 0) {
        throw std::invalid_argument("config field 'episodes_per_training_point': must be >= 0");
    }
    if (cfg.system == SystemKind::single_qubit) {
        if (a.points_for_training != 32 || a.points_for_testing != 320) {
            throw std::invalid_argument(
                "config: the single-qubit grids are fixed at 32 training / 320 test points");
        }
    } else {
        if (a.points_for_training < 0 || a.points_for_training > 6912) {
            throw std::invalid_argument("config field 'points_for_training': must lie in [0, 6912]");
        }
        if (a.points_for_testing != 6912 - a.points_for_training) {
            throw std::invalid_argument(
                "config: points_for_testing must equal 6912 - points_for_training");
        }
    }
    if (cfg.eval_subsample < 0) throw std::invalid_argument("config field 'eval_subsample': must be >= 0");
    if (cfg.histogram_bins < 1) throw std::invalid_argument("config field 'histogram_bins': must be >= 1");
    if (cfg.noise.realizations < 1) throw std::invalid_argument("config field 'noise_realizations': must be >= 1");
    if (cfg.grape.max_iterations < 0) throw std::invalid_argument("config field 'grape_max_iterations': must be >= 0");
    if (cfg.grape.step_size <= 0.0) throw std::invalid_argument("config field 'grape_step_size': must be positive");
    if (cfg.grape.restarts < 1) throw std::invalid_argument("config field 'grape_restarts': must be >= 1");
    if (cfg.jobs < 1) throw std::invalid_argument("config field 'jobs': must be >= 1");
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    // system/target choose the default block, so they apply first
    RunConfig probe;
    for (const auto& [k, v] : entries) {
        if (k == "system" || k == "target") apply_config_entry(probe, k, v);
    }
    RunConfig cfg = default_config(probe.system, probe.target == TargetKind::custom
                                                     ? (probe.system == SystemKind::single_qubit
                                                            ? TargetKind::zero
                                                            : TargetKind::bell)
                                                     : probe.target);
    cfg.target = probe.target;
    if (probe.target == TargetKind::custom) cfg.target_state.resize(0);
    for (const auto& [k, v] : entries) {
        if (k != "system" && k != "target") apply_config_entry(cfg, k, v);
    }
    finalize_config(cfg);
    return cfg;
}

std::string canonical_text(const RunConfig& cfg) {
    const AgentConfig& a = cfg.agent;
    std::map<std::string, std::string> kv;
    kv["system"] = to_string(cfg.system);
    kv["target"] = to_string(cfg.target);
    {
        std::string s;
        for (Eigen::Index i = 0; i < cfg.target_state.size(); ++i) {
            if (i) s += ",";
            s += fmt(cfg.target_state(i).real()) + "," + fmt(cfg.target_state(i).imag());
        }
        kv["target_state"] = s;
    }
    {
        std::string s;
        for (std::size_t i = 0; i < a.allowed_actions.size(); ++i) {
            if (i) s += ",";
            s += fmt(a.allowed_actions[i]);
        }
        kv["allowed_actions"] = s;
    }
    kv["points_for_training"] = std::to_string(a.points_for_training);
    kv["points_for_testing"] = std::to_string(a.points_for_testing);
    kv["batch_size"] = std::to_string(a.batch_size);
    kv["memory_size"] = std::to_string(a.memory_size);
    kv["learning_rate"] = fmt(a.learning_rate);
    kv["replace_period"] = std::to_string(a.replace_period);
    kv["max_reward"] = fmt(a.max_reward);
    kv["discount_factor"] = fmt(a.discount_factor);
    {
        std::string s;
        for (std::size_t i = 0; i < a.hidden_layers.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(a.hidden_layers[i]);
        }
        kv["hidden_layers"] = s;
    }
    kv["activation"] = "relu";
    kv["epsilon_increment"] = fmt(a.epsilon_increment);
    kv["epsilon_max"] = fmt(a.epsilon_max);
    kv["epsilon_testing"] = fmt(a.epsilon_testing);
    kv["max_steps_per_episode"] = std::to_string(a.max_steps_per_episode);
    kv["episodes_per_training_point"] = std::to_string(a.episodes_per_training_point);
    kv["total_time"] = fmt(a.total_time);
    kv["action_duration"] = fmt(a.action_duration);
    kv["success_threshold"] = fmt(a.success_threshold);
    kv["seed"] = std::to_string(cfg.seed);
    kv["eval_subsample"] = std::to_string(cfg.eval_subsample);
    kv["histogram_bins"] = std::to_string(cfg.histogram_bins);
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.noise.amplitudes.size(); ++i) {
            if (i) s += ",";
            s += fmt(cfg.noise.amplitudes[i]);
        }
        kv["noise_amplitudes"] = s;
    }
    kv["noise_realizations"] = std::to_string(cfg.noise.realizations);
    kv["noise_recompute_j12"] = cfg.noise.recompute_j12 ? "true" : "false";
    kv["grape_step_size"] = fmt(cfg.grape.step_size);
    kv["grape_max_iterations"] = std::to_string(cfg.grape.max_iterations);
    kv["grape_tolerance"] = fmt(cfg.grape.tolerance);
    kv["grape_restarts"] = std::to_string(cfg.grape.restarts);

    std::string out;
    for (const auto& [k, v] : kv) {
        out += k + " = " + v + "\n";
    }
    return out;
}

}  // namespace usp
