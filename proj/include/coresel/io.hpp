#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "coresel/core.hpp"
#include "coresel/css.hpp"
#include "coresel/huq.hpp"

namespace coresel::io {

enum class EmbeddingFormat { Binary, Csv };

inline constexpr char kEmbeddingMagic[4] = {'C', 'S', 'S', 'F'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;

/// Picks Csv for a ".csv" extension, Binary otherwise.
EmbeddingFormat format_for_path(const std::filesystem::path& path);

/// Reads an embedding matrix and re-normalizes every row. Binary layout:
/// "CSSF", u32 version, u64 n, u64 d, then n*d float32, all little-endian.
/// CSV: no header, one row of d reals per line.
EmbeddingSet read_embeddings(const std::filesystem::path& path, EmbeddingFormat format);
EmbeddingSet read_embeddings(const std::filesystem::path& path);

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path,
                      EmbeddingFormat format = EmbeddingFormat::Binary);

/// Serialized bytes of the binary format; exposed for tests.
std::vector<char> encode_embeddings(std::size_t n, std::size_t d, const std::vector<float>& values);

std::string selection_to_json(const SelectionResult& result);
SelectionResult selection_from_json(const std::string& text);
void write_selection(const SelectionResult& result, const std::filesystem::path& path);
SelectionResult read_selection(const std::filesystem::path& path);

std::string trace_record_to_json(const TraceRecord& record);

/// Probability table with header id,label,p_0..p_{K-1},p1_0..,p2_0..
std::vector<huq::ProbTriple> read_prob_csv(const std::filesystem::path& path);
std::vector<huq::ProbTriple> parse_prob_csv(const std::string& text);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace coresel::io
