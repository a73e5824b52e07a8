#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rbws/msrb.hpp"
#include "rbws/reduced_basis.hpp"

namespace rbws {

// Binary layout: "RBWS", u32 version, u32 kind, u64 full size, u64 N, u64 K_max;
// then matrices (u64 rows, u64 cols, column-major f64), then index arrays
// (u64 length, u64 entries), then a u64 FNV-1a checksum of everything before
// it. All integers and floats little-endian.
enum class ModelKind : std::uint32_t { pod = 1, l1roc = 2, msrb = 3 };

inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string encode_model(const PodBasis& model);
std::string encode_model(const L1rocModel& model);
std::string encode_model(const MsrbHierarchy& model);

// All decoders throw ModelFormatError on a bad magic, version, kind, length
// or checksum; nothing is returned on failure.
ModelKind peek_model_kind(std::string_view bytes);
PodBasis decode_pod(std::string_view bytes);
L1rocModel decode_l1roc(std::string_view bytes);
MsrbHierarchy decode_msrb(std::string_view bytes);

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

template <class Model>
void save_model(const Model& model, const std::filesystem::path& path);
std::string read_file(const std::filesystem::path& path);
PodBasis load_pod(const std::filesystem::path& path);
L1rocModel load_l1roc(const std::filesystem::path& path);
MsrbHierarchy load_msrb(const std::filesystem::path& path);

}  // namespace rbws
