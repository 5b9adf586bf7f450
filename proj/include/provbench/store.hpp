#pragma once

// Content-addressed artifact store.
//
// Layout on disk:
//   <root>/objects/<hh>/<hash>.json   canonical bytes of the full artifact
//                                     document (hh = first two hex chars)
//   <root>/index.json                 id -> hash mapping
//   <root>/lock                       advisory write lock
//
// The content address is SHA-256 over the canonical hash-scope document:
// payload, sorted parents, quality, summary, and the metadata fields
// producer/tool/application/schema_version. Artifact id and timestamp stay
// outside the hash scope unless hash_includes_timestamp is set; they live in
// a separate "envelope" key of the object file, protected by their own seal
// digest so that verify() still detects any single-byte mutation.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "provbench/random.hpp"

namespace provbench {

using Json = nlohmann::json;

enum class Quality { ok, degraded, failed };

std::string quality_name(Quality q);
Quality quality_from_name(const std::string& name);

struct ArtifactMeta {
    std::string producer;
    std::string tool;
    std::string application;
    std::string schema_version;
    std::int64_t timestamp_unix = 0;
};

struct Artifact {
    std::string id;
    Json payload;
    ArtifactMeta metadata;
    std::vector<std::string> parents; // sorted, unique
    Quality quality = Quality::ok;
    std::string summary;
    std::string hash;
};

struct StoreOptions {
    bool hash_includes_timestamp = false;
};

struct PutResult {
    std::string id;
    std::string digest;
    bool created = false; // false when an identical artifact already existed
};

struct VerifyFailure {
    std::string id;
    std::string reason;
};

struct VerifyReport {
    std::size_t checked = 0;
    std::size_t passed = 0;
    std::vector<VerifyFailure> failed;

    bool ok() const noexcept { return failed.empty(); }
};

// RFC 3339 second-resolution UTC timestamps.
std::string format_utc(std::int64_t unix_seconds);
std::int64_t parse_utc(const std::string& text);

class ArtifactStore {
public:
    // Opens an existing store or initializes an empty one at root.
    explicit ArtifactStore(std::filesystem::path root, StoreOptions options = {});

    const std::filesystem::path& root() const noexcept { return root_; }
    const StoreOptions& options() const noexcept { return options_; }
    std::size_t object_count() const noexcept { return index_.size(); }

    // Deterministic id minting for reproducible runs. Without this, ids are
    // minted from the wall clock and a nondeterministic seed.
    void use_deterministic_ids(std::uint64_t seed);

    PutResult put_artifact(const Json& payload, const ArtifactMeta& meta,
                           const std::vector<std::string>& parents, Quality quality,
                           const std::string& summary);

    Artifact get_artifact(const std::string& id) const;

    bool contains(const std::string& id) const { return index_.count(id) > 0; }
    std::optional<std::string> hash_of(const std::string& id) const;
    std::optional<std::string> id_for_digest(const std::string& digest) const;
    std::vector<std::string> ids() const; // sorted

    // Re-hashes and re-validates every stored object. Read-only.
    VerifyReport verify() const;

    // Hash-scope document for an artifact about to be stored; exposed so the
    // digest of a document can be computed without writing it.
    Json hash_scope_document(const Json& payload, const ArtifactMeta& meta,
                             const std::vector<std::string>& parents, Quality quality,
                             const std::string& summary) const;

private:
    std::filesystem::path root_;
    StoreOptions options_;
    std::map<std::string, std::string> index_;        // id -> hash
    std::map<std::string, std::string> digest_to_id_; // hash -> id
    std::uint64_t mint_counter_ = 0;
    std::optional<Substream> id_rng_;
    bool deterministic_ids_ = false;

    std::filesystem::path object_path(const std::string& hash) const;
    std::string mint_id();
    void load_index();
    void persist_index() const;
    void write_object(const std::string& hash, const std::string& bytes) const;
    std::string read_object_bytes(const std::string& hash) const;
    void check_object(const std::string& id, const std::string& expected_hash) const;
};

} // namespace provbench
