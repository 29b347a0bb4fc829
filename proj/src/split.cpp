#include "split.hpp"

#include <algorithm>
#include <map>

#include "error.hpp"
#include "rng.hpp"

namespace pogest {

DatasetManifest split_sessions(const DatasetManifest& manifest, uint64_t rng_seed) {
    manifest.validate();
    std::map<std::string, std::vector<std::string>> by_subject;
    for (const auto& s : manifest.sessions) by_subject[s.subject_id].push_back(s.session_id);

    DatasetManifest out = manifest;
    out.split.clear();
    Rng root(rng_seed);
    for (auto& [subject, session_ids] : by_subject) {
        std::sort(session_ids.begin(), session_ids.end());
        Rng rng = root.child("split/" + subject);
        if (session_ids.size() == 1) {
            out.split[session_ids[0]] = Split::train;
            continue;
        }
        size_t test_idx = static_cast<size_t>(rng.uniform_int(session_ids.size()));
        for (size_t i = 0; i < session_ids.size(); ++i)
            out.split[session_ids[i]] = (i == test_idx) ? Split::test : Split::train;
    }
    return out;
}

} // namespace pogest
