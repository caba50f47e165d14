#include "usp/io.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace usp {

namespace {

constexpr char kMagic[8] = {'U', 'S', 'P', 'C', 'K', 'P', 'T', '\n'};
constexpr std::uint32_t kVersion = 1;

void write_raw(std::ostream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void read_raw(std::istream& in, void* p, std::size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (!in) throw std::runtime_error("checkpoint truncated");
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, mode);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Mlp& net, std::uint64_t seed) {
    std::ofstream out = open_out(path, std::ios::binary);
    write_raw(out, kMagic, sizeof(kMagic));
    write_raw(out, &kVersion, sizeof(kVersion));
    write_raw(out, &seed, sizeof(seed));
    const auto& sizes = net.spec().sizes;
    const std::uint32_t n = static_cast<std::uint32_t>(sizes.size());
    write_raw(out, &n, sizeof(n));
    for (int s : sizes) {
        const std::uint32_t v = static_cast<std::uint32_t>(s);
        write_raw(out, &v, sizeof(v));
    }
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto& w = net.weights()[l];
        const auto& b = net.biases()[l];
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                const double v = w(r, c);
                write_raw(out, &v, sizeof(v));
            }
        }
        for (Eigen::Index r = 0; r < b.size(); ++r) {
            const double v = b(r);
            write_raw(out, &v, sizeof(v));
        }
    }
    if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

Mlp load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path.string() + "'");
    char magic[8];
    read_raw(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("'" + path.string() + "' is not a checkpoint file");
    }
    std::uint32_t version = 0;
    read_raw(in, &version, sizeof(version));
    if (version != kVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    std::uint64_t seed = 0;
    read_raw(in, &seed, sizeof(seed));
    if (seed_out) *seed_out = seed;
    std::uint32_t n = 0;
    read_raw(in, &n, sizeof(n));
    if (n < 3 || n > 64) throw std::runtime_error("corrupt checkpoint layer count");
    LayerSpec spec;
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t v = 0;
        read_raw(in, &v, sizeof(v));
        spec.sizes.push_back(static_cast<int>(v));
    }
    if (!spec.valid()) throw std::runtime_error("corrupt checkpoint layer sizes");
    std::vector<Eigen::MatrixXd> weights;
    std::vector<Eigen::VectorXd> biases;
    for (std::size_t l = 0; l + 1 < spec.sizes.size(); ++l) {
        Eigen::MatrixXd w(spec.sizes[l + 1], spec.sizes[l]);
        for (Eigen::Index r = 0; r < w.rows(); ++r) {
            for (Eigen::Index c = 0; c < w.cols(); ++c) {
                read_raw(in, &w(r, c), sizeof(double));
            }
        }
        Eigen::VectorXd b(spec.sizes[l + 1]);
        for (Eigen::Index r = 0; r < b.size(); ++r) {
            read_raw(in, &b(r), sizeof(double));
        }
        weights.push_back(std::move(w));
        biases.push_back(std::move(b));
    }
    Mlp net;
    net.set_params(std::move(spec), std::move(weights), std::move(biases));
    return net;
}

std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string file_hash_hex(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes.data(), bytes.size())));
    return buf;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_task_set(const std::filesystem::path& path, const SingleTaskSet& set,
                    std::uint64_t seed) {
    std::ofstream out = open_out(path);
    out << "# role = " << (set.role == SetRole::train ? "train" : "test") << "\n";
    out << "# system = single\n";
    out << "# seed = " << seed << "\n";
    out << "# count = " << set.points.size() << "\n";
    for (const auto& p : set.points) {
        out << format_double(p.theta) << " " << format_double(p.phi) << "\n";
    }
}

void write_task_set(const std::filesystem::path& path, const TwoQubitTaskSet& set,
                    std::uint64_t seed) {
    std::ofstream out = open_out(path);
    out << "# role = " << (set.role == SetRole::train ? "train" : "test") << "\n";
    out << "# system = two\n";
    out << "# seed = " << seed << "\n";
    out << "# count = " << set.points.size() << "\n";
    for (const auto& p : set.points) {
        out << format_double(p.thetas[0]) << " " << format_double(p.thetas[1]) << " "
            << format_double(p.thetas[2]);
        for (int k : p.phase_indices) out << " " << k;
        out << "\n";
    }
}

namespace {

struct SetHeader {
    SetRole role = SetRole::train;
    std::string system;
    std::size_t count = 0;
};

SetHeader parse_header_line(SetHeader header, const std::string& line) {
    std::istringstream ss(line.substr(1));
    std::string key, eq, value;
    if (ss >> key >> eq >> value && eq == "=") {
        if (key == "role") header.role = value == "train" ? SetRole::train : SetRole::test;
        if (key == "system") header.system = value;
        if (key == "count") header.count = std::stoul(value);
    }
    return header;
}

}  // namespace

SingleTaskSet read_single_task_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open task set '" + path.string() + "'");
    SingleTaskSet set;
    SetHeader header;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            header = parse_header_line(header, line);
            continue;
        }
        std::istringstream ss(line);
        BlochPoint p;
        if (!(ss >> p.theta >> p.phi)) throw std::runtime_error("bad task-set line: " + line);
        set.points.push_back(p);
    }
    if (header.system != "single") throw std::runtime_error("task set is not single-qubit");
    if (header.count != set.points.size()) throw std::runtime_error("task-set count mismatch");
    set.role = header.role;
    return set;
}

TwoQubitTaskSet read_two_qubit_task_set(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open task set '" + path.string() + "'");
    TwoQubitTaskSet set;
    SetHeader header;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            header = parse_header_line(header, line);
            continue;
        }
        std::istringstream ss(line);
        HyperspherePoint p;
        if (!(ss >> p.thetas[0] >> p.thetas[1] >> p.thetas[2] >> p.phase_indices[0] >>
              p.phase_indices[1] >> p.phase_indices[2] >> p.phase_indices[3])) {
            throw std::runtime_error("bad task-set line: " + line);
        }
        set.points.push_back(p);
    }
    if (header.system != "two") throw std::runtime_error("task set is not two-qubit");
    if (header.count != set.points.size()) throw std::runtime_error("task-set count mismatch");
    set.role = header.role;
    return set;
}

nlohmann::json task_to_json(const TaskPoint& point) {
    nlohmann::json j;
    if (point.system == SystemKind::single_qubit) {
        j["system"] = "single";
        j["theta"] = point.bloch.theta;
        j["phi"] = point.bloch.phi;
    } else {
        j["system"] = "two";
        j["thetas"] = point.hyper.thetas;
        j["phases"] = point.hyper.phase_indices;
    }
    return j;
}

nlohmann::json trajectory_record(const EvalRecord& record, const PreparationTask& task,
                                 SystemKind system) {
    nlohmann::json j;
    j["task_index"] = record.task_index;
    j["task"] = task_to_json(task.point);
    j["actions"] = record.trajectory.actions;
    if (system == SystemKind::single_qubit) {
        std::vector<double> pulses;
        pulses.reserve(record.trajectory.pulses.size());
        for (const auto& p : record.trajectory.pulses) pulses.push_back(p[0]);
        j["pulses"] = pulses;
    } else {
        j["pulses"] = record.trajectory.pulses;
    }
    j["fidelity_per_step"] = record.trajectory.fidelity_per_step;
    j["initial_fidelity"] = record.trajectory.initial_fidelity;
    j["final_fidelity"] = record.trajectory.final_fidelity;
    j["max_fidelity"] = record.trajectory.max_fidelity;
    j["max_fidelity_step"] = record.trajectory.max_fidelity_step;
    j["steps"] = record.trajectory.steps();
    j["design_time_seconds"] = record.design_seconds;
    return j;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records) {
    std::ofstream out = open_out(path);
    for (const auto& r : records) {
        out << r.dump() << "\n";
    }
}

void write_histogram_csv(const std::filesystem::path& path, const std::vector<long>& counts) {
    std::ofstream out = open_out(path);
    out << "bin_lo,bin_hi,count\n";
    const double width = 1.0 / static_cast<double>(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        out << format_double(width * static_cast<double>(i)) << ","
            << format_double(width * static_cast<double>(i + 1)) << "," << counts[i] << "\n";
    }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
    std::ofstream out = open_out(path);
    out << "channel,kind,amplitude,realizations,average_fidelity,clean_average\n";
    for (const auto& r : rows) {
        out << to_string(r.channel) << "," << to_string(r.kind) << ","
            << format_double(r.amplitude) << "," << r.realizations << ","
            << format_double(r.average_fidelity) << "," << format_double(r.clean_average) << "\n";
    }
}

void write_bloch_trail_csv(const std::filesystem::path& path,
                           const std::vector<BlochVector>& trail) {
    std::ofstream out = open_out(path);
    out << "step,x,y,z\n";
    for (std::size_t i = 0; i < trail.size(); ++i) {
        out << i << "," << format_double(trail[i].x) << "," << format_double(trail[i].y) << ","
            << format_double(trail[i].z) << "\n";
    }
}

void write_summary(const std::filesystem::path& path, const EvalSummary& summary) {
    std::ofstream out = open_out(path);
    out << "tasks = " << summary.tasks << "\n";
    out << "average_max_fidelity = " << format_double(summary.average_max_fidelity) << "\n";
    out << "average_design_time_seconds = " << format_double(summary.average_design_seconds)
        << "\n";
    out << "success_rate = " << format_double(summary.success_rate) << "\n";
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out = open_out(path);
    out << text;
}

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const RunConfig& cfg, const std::string& checkpoint_hash,
                    const std::vector<std::string>& outputs) {
    const std::string canonical = canonical_text(cfg);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canonical.data(), canonical.size())));
    nlohmann::json j;
    j["command"] = command;
    j["version"] = "0.1.0";
    j["seed"] = cfg.seed;
    j["config_hash"] = hash;
    j["config"] = canonical;
    if (!checkpoint_hash.empty()) j["checkpoint_hash"] = checkpoint_hash;
    j["outputs"] = outputs;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

nlohmann::json training_report_json(const TrainingReport& report) {
    nlohmann::json j;
    j["total_env_steps"] = report.total_env_steps;
    j["wall_seconds"] = report.wall_seconds;
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : report.points) {
        points.push_back({{"point_index", p.point_index},
                          {"episodes", p.episodes},
                          {"successes", p.successes},
                          {"success_rate",
                           p.episodes ? static_cast<double>(p.successes) / p.episodes : 0.0},
                          {"mean_steps", p.mean_steps},
                          {"final_epsilon", p.final_epsilon}});
    }
    j["points"] = points;
    nlohmann::json losses = nlohmann::json::array();
    for (const auto& [step, loss] : report.loss_samples) {
        losses.push_back({{"step", step}, {"loss", loss}});
    }
    j["loss_samples"] = losses;
    return j;
}

}  // namespace usp
