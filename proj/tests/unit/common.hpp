#pragma once

#include <filesystem>
#include <string>

#include "inferedge/profiles.hpp"

namespace testdata {

inline std::filesystem::path source_dir() { return INFEREDGE_SOURCE_DIR; }
inline std::filesystem::path profiles_path() { return source_dir() / "profiles" / "paper_tx2.json"; }
inline std::filesystem::path config_path(const std::string& name) {
    return source_dir() / "configs" / (name + ".json");
}

inline const inferedge::ProfileStore& store() {
    static const inferedge::ProfileStore s = inferedge::load_profiles(profiles_path());
    return s;
}

/// Bundled profiles reduced to the named versions of one family.
inline inferedge::ProfileStore subset(const std::string& family, const std::vector<std::string>& versions) {
    nlohmann::json doc = store().to_json();
    nlohmann::json out = {{"families", nlohmann::json::array()}};
    for (auto& f : doc["families"]) {
        if (f["name"] != family) continue;
        nlohmann::json keep = nlohmann::json::array();
        for (auto& v : f["versions"])
            for (const auto& name : versions)
                if (v["name"] == name) keep.push_back(v);
        f["versions"] = keep;
        out["families"].push_back(f);
    }
    return inferedge::ProfileStore::from_json(out);
}

}  // namespace testdata
