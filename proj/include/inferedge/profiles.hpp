#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"

namespace inferedge {

/// One candidate split of a DNN version. Everything on the device side is
/// cumulative through `layer_id`; `server_latency_ms` is the tail remaining
/// on the edge server.
struct CutPointProfile {
    int layer_id = 0;
    double local_latency_ms = 0.0;
    double local_energy_j = 0.0;
    std::int64_t output_bytes = 0;
    double server_latency_ms = 0.0;

    bool operator==(const CutPointProfile&) const = default;
};

struct VersionProfile {
    std::string name;
    double top1_accuracy = 0.0;
    int layer_count = 0;
    /// Denominators of the latency and energy scores (full on-device run).
    double full_local_latency_ms = 0.0;
    double full_local_energy_j = 0.0;
    std::vector<CutPointProfile> cut_points;

    bool operator==(const VersionProfile&) const = default;
};

struct ModelFamily {
    std::string name;
    std::vector<VersionProfile> versions;

    bool operator==(const ModelFamily&) const = default;

    /// Index of the version with the highest top-1 accuracy (first on ties).
    [[nodiscard]] int heaviest_version() const;
};

/// Immutable catalog of model families. Families keep their file order.
class ProfileStore {
public:
    ProfileStore() = default;

    /// Validates every invariant; throws ProfileError with family/version/cut
    /// context on the first violation.
    static ProfileStore from_json(const nlohmann::json& doc);

    [[nodiscard]] nlohmann::json to_json() const;

    [[nodiscard]] const std::vector<ModelFamily>& families() const noexcept { return families_; }
    [[nodiscard]] bool contains(std::string_view family) const;

    /// Throws LookupError for an unknown family.
    [[nodiscard]] const ModelFamily& family(std::string_view name) const;
    [[nodiscard]] const VersionProfile& version(std::string_view family, int version_index) const;
    [[nodiscard]] const CutPointProfile& cut(std::string_view family, int version_index,
                                             int cut_index) const;

    /// Largest version count / cut count over all families; sizes the policy heads.
    [[nodiscard]] int max_versions() const;
    [[nodiscard]] int max_cuts() const;

private:
    std::vector<ModelFamily> families_;
    std::unordered_map<std::string, std::size_t> index_;
};

ProfileStore load_profiles(const std::filesystem::path& path);

const CutPointProfile& get_cut(const ProfileStore& store, std::string_view family,
                               int version_index, int cut_index);

}  // namespace inferedge
