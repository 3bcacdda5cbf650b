#include "inferedge/profiles.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "inferedge/error.hpp"

namespace inferedge {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ProfileError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
    return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
    return v.get<double>();
}

std::int64_t integer(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer()) fail(where, std::string("field '") + key + "' must be an integer");
    return v.get<std::int64_t>();
}

std::string text(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_string()) fail(where, std::string("field '") + key + "' must be a string");
    return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_array()) fail(where, std::string("field '") + key + "' must be an array");
    return v;
}

CutPointProfile parse_cut(const json& j, const std::string& where) {
    CutPointProfile c;
    c.layer_id = static_cast<int>(integer(j, "layer_id", where));
    c.local_latency_ms = number(j, "local_latency_ms", where);
    c.local_energy_j = number(j, "local_energy_j", where);
    c.output_bytes = integer(j, "output_bytes", where);
    c.server_latency_ms = number(j, "server_latency_ms", where);
    if (c.layer_id <= 0) fail(where, "layer_id must be positive");
    if (c.local_latency_ms < 0.0) fail(where, "local_latency_ms must be >= 0");
    if (c.local_energy_j < 0.0) fail(where, "local_energy_j must be >= 0");
    if (c.output_bytes < 0) fail(where, "output_bytes must be >= 0");
    if (c.server_latency_ms < 0.0) fail(where, "server_latency_ms must be >= 0");
    return c;
}

VersionProfile parse_version(const json& j, const std::string& family_where) {
    VersionProfile v;
    v.name = text(j, "name", family_where);
    const std::string where = family_where + "/" + v.name;
    v.top1_accuracy = number(j, "top1_accuracy", where);
    v.layer_count = static_cast<int>(integer(j, "layer_count", where));
    v.full_local_latency_ms = number(j, "full_local_latency_ms", where);
    v.full_local_energy_j = number(j, "full_local_energy_j", where);

    if (!(v.top1_accuracy > 0.0 && v.top1_accuracy < 1.0))
        fail(where, "top1_accuracy must lie in (0, 1)");
    if (v.layer_count <= 0) fail(where, "layer_count must be positive");
    if (!(v.full_local_latency_ms > 0.0)) fail(where, "full_local_latency_ms must be > 0");
    if (!(v.full_local_energy_j > 0.0)) fail(where, "full_local_energy_j must be > 0");

    const json& cuts = array(j, "cut_points", where);
    if (cuts.empty()) fail(where, "cut_points must not be empty");
    for (const json& cj : cuts) {
        const std::string cut_where =
            where + "/cut " + (cj.is_object() && cj.contains("layer_id") ? cj["layer_id"].dump() : "?");
        v.cut_points.push_back(parse_cut(cj, cut_where));
    }

    for (std::size_t i = 0; i < v.cut_points.size(); ++i) {
        const auto& c = v.cut_points[i];
        const std::string cut_where = where + "/cut " + std::to_string(c.layer_id);
        if (c.layer_id > v.layer_count) fail(cut_where, "layer_id exceeds layer_count");
        if (c.layer_id == v.layer_count && c.server_latency_ms != 0.0)
            fail(cut_where, "final-layer cut must have server_latency_ms == 0");
        if (c.local_latency_ms > v.full_local_latency_ms)
            fail(cut_where, "local_latency_ms exceeds full_local_latency_ms");
        if (c.local_energy_j > v.full_local_energy_j)
            fail(cut_where, "local_energy_j exceeds full_local_energy_j");
        if (i == 0) continue;
        const auto& prev = v.cut_points[i - 1];
        if (c.layer_id <= prev.layer_id) fail(cut_where, "layer_id must be strictly increasing");
        // Energy is not checked: the measured ResNet18 table dips between cuts 15 and 20.
        if (c.local_latency_ms < prev.local_latency_ms)
            fail(cut_where, "cumulative local_latency_ms decreases (from " +
                                std::to_string(prev.local_latency_ms) + " at layer " +
                                std::to_string(prev.layer_id) + ")");
    }
    return v;
}

json cut_to_json(const CutPointProfile& c) {
    return json{{"layer_id", c.layer_id},
                {"local_latency_ms", c.local_latency_ms},
                {"local_energy_j", c.local_energy_j},
                {"output_bytes", c.output_bytes},
                {"server_latency_ms", c.server_latency_ms}};
}

}  // namespace

int ModelFamily::heaviest_version() const {
    int best = 0;
    for (int i = 1; i < static_cast<int>(versions.size()); ++i)
        if (versions[i].top1_accuracy > versions[best].top1_accuracy) best = i;
    return best;
}

ProfileStore ProfileStore::from_json(const json& doc) {
    ProfileStore store;
    const json& fams = array(doc, "families", "profiles");
    for (const json& fj : fams) {
        ModelFamily fam;
        fam.name = text(fj, "name", "profiles");
        const std::string where = "family " + fam.name;
        if (store.index_.count(fam.name)) fail(where, "duplicate family name");
        const json& vers = array(fj, "versions", where);
        if (vers.empty()) fail(where, "versions must not be empty");
        for (const json& vj : vers) {
            VersionProfile v = parse_version(vj, where);
            for (const auto& existing : fam.versions)
                if (existing.name == v.name) fail(where + "/" + v.name, "duplicate version name");
            fam.versions.push_back(std::move(v));
        }
        store.index_.emplace(fam.name, store.families_.size());
        store.families_.push_back(std::move(fam));
    }
    return store;
}

json ProfileStore::to_json() const {
    json fams = json::array();
    for (const auto& f : families_) {
        json vers = json::array();
        for (const auto& v : f.versions) {
            json cuts = json::array();
            for (const auto& c : v.cut_points) cuts.push_back(cut_to_json(c));
            vers.push_back(json{{"name", v.name},
                                {"top1_accuracy", v.top1_accuracy},
                                {"layer_count", v.layer_count},
                                {"full_local_latency_ms", v.full_local_latency_ms},
                                {"full_local_energy_j", v.full_local_energy_j},
                                {"cut_points", std::move(cuts)}});
        }
        fams.push_back(json{{"name", f.name}, {"versions", std::move(vers)}});
    }
    return json{{"families", std::move(fams)}};
}

bool ProfileStore::contains(std::string_view family) const {
    return index_.count(std::string(family)) != 0;
}

const ModelFamily& ProfileStore::family(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) throw LookupError("unknown model family '" + std::string(name) + "'");
    return families_[it->second];
}

const VersionProfile& ProfileStore::version(std::string_view fam_name, int version_index) const {
    const auto& fam = family(fam_name);
    if (version_index < 0 || version_index >= static_cast<int>(fam.versions.size()))
        throw LookupError("family '" + fam.name + "': version index " +
                          std::to_string(version_index) + " out of range");
    return fam.versions[version_index];
}

const CutPointProfile& ProfileStore::cut(std::string_view fam_name, int version_index,
                                         int cut_index) const {
    const auto& v = version(fam_name, version_index);
    if (cut_index < 0 || cut_index >= static_cast<int>(v.cut_points.size()))
        throw LookupError("version '" + v.name + "': cut index " + std::to_string(cut_index) +
                          " out of range");
    return v.cut_points[cut_index];
}

int ProfileStore::max_versions() const {
    std::size_t n = 0;
    for (const auto& f : families_) n = std::max(n, f.versions.size());
    return static_cast<int>(n);
}

int ProfileStore::max_cuts() const {
    std::size_t n = 0;
    for (const auto& f : families_)
        for (const auto& v : f.versions) n = std::max(n, v.cut_points.size());
    return static_cast<int>(n);
}

ProfileStore load_profiles(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProfileError("cannot open profile file '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        throw ProfileError("'" + path.string() + "': " + e.what());
    }
    return ProfileStore::from_json(doc);
}

const CutPointProfile& get_cut(const ProfileStore& store, std::string_view family,
                               int version_index, int cut_index) {
    return store.cut(family, version_index, cut_index);
}

}  // namespace inferedge
