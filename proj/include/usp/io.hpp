#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "usp/environment.hpp"
#include "usp/grape.hpp"
#include "usp/mlp.hpp"
#include "usp/noise.hpp"
#include "usp/task_sets.hpp"

namespace usp {

// Versioned binary checkpoint (magic, version, seed, layer sizes, then the
// raw double matrices). Round-trips bit-exactly.
void save_checkpoint(const std::filesystem::path& path, const Mlp& net, std::uint64_t seed);
Mlp load_checkpoint(const std::filesystem::path& path, std::uint64_t* seed_out = nullptr);

std::uint64_t fnv1a64(const void* data, std::size_t len);
std::string file_hash_hex(const std::filesystem::path& path);
std::string format_double(double v);  // %.17g, round-trip exact

// Line-oriented task-set export: '#' manifest header (role, seed, count,
// system) followed by one point per line.
void write_task_set(const std::filesystem::path& path, const SingleTaskSet& set,
                    std::uint64_t seed);
void write_task_set(const std::filesystem::path& path, const TwoQubitTaskSet& set,
                    std::uint64_t seed);
SingleTaskSet read_single_task_set(const std::filesystem::path& path);
TwoQubitTaskSet read_two_qubit_task_set(const std::filesystem::path& path);

nlohmann::json task_to_json(const TaskPoint& point);
nlohmann::json trajectory_record(const EvalRecord& record, const PreparationTask& task,
                                 SystemKind system);

// One JSON record per line.
void write_jsonl(const std::filesystem::path& path, const std::vector<nlohmann::json>& records);

void write_histogram_csv(const std::filesystem::path& path, const std::vector<long>& counts);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_bloch_trail_csv(const std::filesystem::path& path,
                           const std::vector<BlochVector>& trail);
void write_summary(const std::filesystem::path& path, const EvalSummary& summary);
void write_text(const std::filesystem::path& path, const std::string& text);

void write_manifest(const std::filesystem::path& path, const std::string& command,
                    const RunConfig& cfg, const std::string& checkpoint_hash,
                    const std::vector<std::string>& outputs);

nlohmann::json training_report_json(const TrainingReport& report);

}  // namespace usp
