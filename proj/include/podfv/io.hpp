#pragma once

#include "podfv/hfsolver.hpp"
#include "podfv/pod.hpp"
#include "podfv/romassembly.hpp"
#include "podfv/romsolver.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace podfv {

/// Binary archives: a text magic line, a 64-bit FNV-1a hash of the payload,
/// then the payload as little-endian 64-bit integers and doubles. Matrices are
/// stored as rows, cols and column-major values.
void write_snapshots(const std::filesystem::path& path, const SnapshotSet& s);
SnapshotSet read_snapshots(const std::filesystem::path& path);

/// Boundary conditions are rebuilt from the mesh on reading, so the mesh hash
/// stored in the archive must match.
void write_basis(const std::filesystem::path& path, const PodBasis& basis);
PodBasis read_basis(const std::filesystem::path& path, const Mesh& mesh);

void write_rom(const std::filesystem::path& path, const ReducedSystem& system);
/// Throws StaleArtifact when `expected_basis_hash` is given and differs.
ReducedSystem read_rom(const std::filesystem::path& path, std::optional<std::uint64_t> expected_basis_hash = {});

/// Payload hash stored in an archive header.
std::uint64_t archive_hash(const std::filesystem::path& path);

/// `t,Dc,Lc`
void write_forces_csv(const std::filesystem::path& path, const ForceHistory& h);
ForceHistory read_forces_csv(const std::filesystem::path& path);

/// `t,a_1..a_Nu,b_1..b_Np`
void write_coefficients_csv(const std::filesystem::path& path, const std::vector<ReducedState>& states);
std::vector<ReducedState> read_coefficients_csv(const std::filesystem::path& path);

}  // namespace podfv
