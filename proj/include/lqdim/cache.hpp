#pragma once

/**
 * @file cache.hpp
 * @brief On-disk cache of level-n measures, keyed by a content hash of (WIFS, n) and stored as CBOR.
 */

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <string>

#include "lqdim/json_io.hpp"
#include "lqdim/measure.hpp"

namespace lqdim {

inline std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

class MeasureCache {
public:
    explicit MeasureCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    /// Directory from LQDIM_CACHE_DIR when set, else the given fallback (may be empty = disabled).
    static std::optional<MeasureCache> from_environment(const std::string& fallback) {
        const char* env = std::getenv("LQDIM_CACHE_DIR");
        std::string dir = env && *env ? env : fallback;
        if (dir.empty()) return std::nullopt;
        return MeasureCache(dir);
    }

    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path path_for(const Wifs& w, int n) const {
        char name[64];
        std::snprintf(name, sizeof name, "mu-%016llx-n%d.cbor",
                      static_cast<unsigned long long>(fnv1a(wifs_to_json(w).dump())), n);
        return dir_ / name;
    }

    std::optional<DiscreteMeasure> load(const Wifs& w, int n) const {
        std::ifstream in(path_for(w, n), std::ios::binary);
        if (!in) return std::nullopt;
        std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        Json j = Json::from_cbor(bytes, true, false);
        if (j.is_discarded() || !j.contains("wifs") || j["wifs"] != wifs_to_json(w) || j.value("n", -1) != n)
            return std::nullopt; // hash collision or foreign file
        return measure_from_json(j["measure"]);
    }

    void store(const Wifs& w, int n, const DiscreteMeasure& mu) const {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) fail(ErrorKind::io, "cannot create cache directory " + dir_.string() + ": " + ec.message());
        Json j{{"wifs", wifs_to_json(w)}, {"n", n}, {"measure", measure_to_json(mu)}};
        std::vector<std::uint8_t> bytes = Json::to_cbor(j);
        auto target = path_for(w, n);
        auto tmp = target;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary);
            if (!out) fail(ErrorKind::io, "cannot write " + tmp.string());
            out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        }
        std::filesystem::rename(tmp, target, ec);
        if (ec) fail(ErrorKind::io, "cannot move cache file into place: " + ec.message());
    }

private:
    std::filesystem::path dir_;
};

/// level_n_measure with an optional cache in front of it.
inline DiscreteMeasure cached_level_n_measure(const Wifs& w, int n, const std::optional<MeasureCache>& cache,
                                              std::size_t atom_cap = default_atom_cap) {
    if (cache && w.is_exact()) {
        if (auto hit = cache->load(w, n)) return *hit;
        DiscreteMeasure mu = level_n_measure(w, n, atom_cap);
        cache->store(w, n, mu);
        return mu;
    }
    return level_n_measure(w, n, atom_cap);
}

/// μ_1..μ_{n_max}, reading and filling the cache level by level.
inline std::vector<DiscreteMeasure> cached_level_measures(const Wifs& w, int n_max, const std::optional<MeasureCache>& cache,
                                                          std::size_t atom_cap = default_atom_cap) {
    require_valid(w);
    if (n_max < 1) fail(ErrorKind::domain, "n_max must be >= 1");
    const bool use = cache && w.is_exact();
    const DiscreteMeasure delta = DiscreteMeasure::delta_of(w);
    std::vector<DiscreteMeasure> out;
    Scalar power(1);
    for (int n = 1; n <= n_max; ++n) {
        std::optional<DiscreteMeasure> hit = use ? cache->load(w, n) : std::nullopt;
        if (hit) {
            out.push_back(std::move(*hit));
        } else {
            out.push_back(n == 1 ? delta : convolve(out.back(), scale(delta, power), atom_cap));
            if (use) cache->store(w, n, out.back());
        }
        power *= w.ratio();
    }
    return out;
}

} // namespace lqdim
