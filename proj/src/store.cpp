#include "provbench/store.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

namespace fs = std::filesystem;

std::string quality_name(Quality q) {
    switch (q) {
    case Quality::ok: return "ok";
    case Quality::degraded: return "degraded";
    case Quality::failed: return "failed";
    }
    throw Error(ErrorKind::SchemaError, "invalid quality value");
}

Quality quality_from_name(const std::string& name) {
    if (name == "ok") return Quality::ok;
    if (name == "degraded") return Quality::degraded;
    if (name == "failed") return Quality::failed;
    throw Error(ErrorKind::SchemaError, "unknown quality: " + name);
}

namespace {

// Civil-date conversions (proleptic Gregorian), so timestamps never depend
// on the process locale or TZ database.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = static_cast<int>(yr + (m <= 2));
}

constexpr char kBase32[] = "0123456789ABCDEFGHJKMNPQRSTVWXYZ";

std::string encode_ulid(std::uint64_t time_ms, std::uint64_t rand_hi, std::uint64_t rand_lo) {
    std::string out(26, '0');
    std::uint64_t t = time_ms & ((std::uint64_t{1} << 48) - 1);
    for (int i = 9; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kBase32[t & 31];
        t >>= 5;
    }
    unsigned __int128 r = (static_cast<unsigned __int128>(rand_hi & 0xffff) << 64) | rand_lo;
    for (int i = 25; i >= 10; --i) {
        out[static_cast<std::size_t>(i)] = kBase32[static_cast<unsigned>(r & 31)];
        r >>= 5;
    }
    return out;
}

// Exclusive advisory lock held for the duration of a store mutation.
class ScopedLock {
public:
    explicit ScopedLock(const fs::path& path) {
        fd_ = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
        if (fd_ < 0)
            throw Error(ErrorKind::StoreWriteFailure, "cannot open lock file: " + path.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw Error(ErrorKind::StoreWriteFailure, "cannot lock store: " + path.string());
        }
    }
    ~ScopedLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    ScopedLock(const ScopedLock&) = delete;
    ScopedLock& operator=(const ScopedLock&) = delete;

private:
    int fd_ = -1;
};

void atomic_write(const fs::path& path, const std::string& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorKind::StoreWriteFailure, "cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) throw Error(ErrorKind::StoreWriteFailure, "write failed: " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorKind::StoreWriteFailure, "cannot finalize " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::StoreReadFailure, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw Error(ErrorKind::StoreReadFailure, "read failed: " + path.string());
    return buf.str();
}

std::string seal_digest(const std::string& hash, const std::string& id, const std::string& timestamp) {
    Json body = Json::object();
    body["hash"] = hash;
    body["id"] = id;
    body["timestamp"] = timestamp;
    return sha256_hex(canonicalize(body));
}

const Json& require_string_field(const Json& obj, const char* key, const std::string& what) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw Error(ErrorKind::IntegrityMismatch, what + ": missing or non-string " + key);
    return *it;
}

} // namespace

std::string format_utc(std::int64_t unix_seconds) {
    std::int64_t days = unix_seconds / 86400;
    std::int64_t rem = unix_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                  static_cast<int>(rem % 60));
    return buf;
}

std::int64_t parse_utc(const std::string& text) {
    int y, mo, d, h, mi, s;
    char z;
    if (text.size() != 20 ||
        std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c", &y, &mo, &d, &h, &mi, &s, &z) != 7 ||
        z != 'Z' || mo < 1 || mo > 12 || d < 1 || d > 31 || h > 23 || mi > 59 || s > 60)
        throw Error(ErrorKind::SchemaError, "invalid timestamp: " + text);
    return days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + s;
}

ArtifactStore::ArtifactStore(fs::path root, StoreOptions options)
    : root_(std::move(root)), options_(options) {
    load_index();
}

void ArtifactStore::use_deterministic_ids(std::uint64_t seed) {
    deterministic_ids_ = true;
    mint_counter_ = 0;
    id_rng_.emplace(RandomSource(seed, "store/ids").substream(0));
}

fs::path ArtifactStore::object_path(const std::string& hash) const {
    return root_ / "objects" / hash.substr(0, 2) / (hash + ".json");
}

std::string ArtifactStore::mint_id() {
    ++mint_counter_;
    if (deterministic_ids_)
        return encode_ulid(mint_counter_, id_rng_->next_u64(), id_rng_->next_u64());
    if (!id_rng_) {
        std::random_device rd;
        const std::uint64_t seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
        id_rng_.emplace(RandomSource(seed, "store/ids").substream(0));
    }
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
    return encode_ulid(static_cast<std::uint64_t>(ms), id_rng_->next_u64(), id_rng_->next_u64());
}

void ArtifactStore::load_index() {
    std::error_code ec;
    if (fs::exists(root_) && !fs::is_directory(root_))
        throw Error(ErrorKind::StoreWriteFailure, "store root is not a directory: " + root_.string());
    fs::create_directories(root_ / "objects", ec);
    if (ec) throw Error(ErrorKind::StoreWriteFailure, "cannot create store at " + root_.string());

    const fs::path index_path = root_ / "index.json";
    if (!fs::exists(index_path)) {
        persist_index();
        return;
    }
    Json doc;
    try {
        doc = parse_json_strict(read_file(index_path));
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::StoreReadFailure) throw;
        throw Error(ErrorKind::IntegrityMismatch, std::string("corrupt index: ") + e.what());
    }
    if (!doc.is_object())
        throw Error(ErrorKind::IntegrityMismatch, "corrupt index: not an object");
    for (const auto& [id, hash] : doc.items()) {
        if (!hash.is_string())
            throw Error(ErrorKind::IntegrityMismatch, "corrupt index: non-string hash for " + id);
        index_[id] = hash.get<std::string>();
        digest_to_id_.emplace(hash.get<std::string>(), id);
    }
}

void ArtifactStore::persist_index() const {
    Json doc = Json::object();
    for (const auto& [id, hash] : index_) doc[id] = hash;
    atomic_write(root_ / "index.json", canonicalize(doc));
}

void ArtifactStore::write_object(const std::string& hash, const std::string& bytes) const {
    const fs::path path = object_path(hash);
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw Error(ErrorKind::StoreWriteFailure, "cannot create " + path.parent_path().string());
    atomic_write(path, bytes);
}

std::string ArtifactStore::read_object_bytes(const std::string& hash) const {
    return read_file(object_path(hash));
}

Json ArtifactStore::hash_scope_document(const Json& payload, const ArtifactMeta& meta,
                                        const std::vector<std::string>& parents, Quality quality,
                                        const std::string& summary) const {
    Json meta_doc = Json::object();
    meta_doc["application"] = meta.application;
    meta_doc["producer"] = meta.producer;
    meta_doc["schema_version"] = meta.schema_version;
    meta_doc["tool"] = meta.tool;
    if (options_.hash_includes_timestamp)
        meta_doc["timestamp"] = format_utc(meta.timestamp_unix);

    std::vector<std::string> sorted = parents;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

    Json doc = Json::object();
    doc["metadata"] = meta_doc;
    doc["parents"] = sorted;
    doc["payload"] = payload;
    doc["quality"] = quality_name(quality);
    doc["summary"] = summary;
    return doc;
}

PutResult ArtifactStore::put_artifact(const Json& payload, const ArtifactMeta& meta,
                                      const std::vector<std::string>& parents, Quality quality,
                                      const std::string& summary) {
    if (summary.empty())
        throw Error(ErrorKind::MissingSummary, "artifact summary must be non-empty");
    for (const auto& p : parents)
        if (!contains(p)) throw Error(ErrorKind::UnknownParent, "unknown parent: " + p);

    const Json scope = hash_scope_document(payload, meta, parents, quality, summary);
    const std::string digest = content_address(scope);

    if (auto it = digest_to_id_.find(digest); it != digest_to_id_.end())
        return {it->second, digest, false};

    std::string id = mint_id();
    while (contains(id)) id = mint_id();

    const std::string timestamp = format_utc(meta.timestamp_unix);
    Json envelope = Json::object();
    envelope["hash"] = digest;
    envelope["id"] = id;
    envelope["seal"] = seal_digest(digest, id, timestamp);
    envelope["timestamp"] = timestamp;

    Json full = scope;
    full["envelope"] = envelope;

    ScopedLock lock(root_ / "lock");
    write_object(digest, canonicalize(full));
    index_[id] = digest;
    digest_to_id_[digest] = id;
    persist_index();
    return {id, digest, true};
}

void ArtifactStore::check_object(const std::string& id, const std::string& expected_hash) const {
    const std::string bytes = read_object_bytes(expected_hash);
    Json doc;
    try {
        doc = parse_json_strict(bytes);
    } catch (const Error& e) {
        throw Error(ErrorKind::IntegrityMismatch, id + ": object is not valid JSON: " + e.what());
    }
    if (canonicalize(doc) != bytes)
        throw Error(ErrorKind::IntegrityMismatch, id + ": object bytes are not canonical");
    if (!doc.is_object() || !doc.contains("envelope") || !doc["envelope"].is_object())
        throw Error(ErrorKind::IntegrityMismatch, id + ": missing envelope");

    const Json& env = doc["envelope"];
    const std::string env_hash = require_string_field(env, "hash", id).get<std::string>();
    const std::string env_id = require_string_field(env, "id", id).get<std::string>();
    const std::string env_seal = require_string_field(env, "seal", id).get<std::string>();
    const std::string env_ts = require_string_field(env, "timestamp", id).get<std::string>();
    if (env_id != id)
        throw Error(ErrorKind::IntegrityMismatch, id + ": envelope id mismatch");
    if (env_hash != expected_hash)
        throw Error(ErrorKind::IntegrityMismatch, id + ": envelope hash mismatch");
    if (env_seal != seal_digest(env_hash, env_id, env_ts))
        throw Error(ErrorKind::IntegrityMismatch, id + ": envelope seal mismatch");

    Json scope = doc;
    scope.erase("envelope");
    if (content_address(scope) != expected_hash)
        throw Error(ErrorKind::IntegrityMismatch, id + ": content digest mismatch");
}

Artifact ArtifactStore::get_artifact(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw Error(ErrorKind::NotFound, "no artifact with id " + id);
    check_object(id, it->second);

    const Json doc = parse_json_strict(read_object_bytes(it->second));
    Artifact a;
    a.id = id;
    a.hash = it->second;
    try {
        const Json& meta = doc.at("metadata");
        a.metadata.producer = meta.at("producer").get<std::string>();
        a.metadata.tool = meta.at("tool").get<std::string>();
        a.metadata.application = meta.at("application").get<std::string>();
        a.metadata.schema_version = meta.at("schema_version").get<std::string>();
        a.metadata.timestamp_unix = parse_utc(doc.at("envelope").at("timestamp").get<std::string>());
        a.parents = doc.at("parents").get<std::vector<std::string>>();
        a.payload = doc.at("payload");
        a.quality = quality_from_name(doc.at("quality").get<std::string>());
        a.summary = doc.at("summary").get<std::string>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::IntegrityMismatch, id + ": malformed artifact document: " + e.what());
    }
    return a;
}

std::optional<std::string> ArtifactStore::hash_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> ArtifactStore::id_for_digest(const std::string& digest) const {
    auto it = digest_to_id_.find(digest);
    if (it == digest_to_id_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ArtifactStore::ids() const {
    std::vector<std::string> out;
    out.reserve(index_.size());
    for (const auto& [id, hash] : index_) out.push_back(id);
    return out;
}

VerifyReport ArtifactStore::verify() const {
    VerifyReport report;
    std::map<std::string, bool> referenced;
    for (const auto& [id, hash] : index_) {
        ++report.checked;
        referenced[hash] = true;
        try {
            check_object(id, hash);
            ++report.passed;
        } catch (const Error& e) {
            report.failed.push_back({id, e.what()});
        }
    }
    // Object files nobody references are equally a sign of tampering.
    std::error_code ec;
    for (fs::recursive_directory_iterator it(root_ / "objects", ec), end; !ec && it != end;
         it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        const std::string name = it->path().stem().string();
        if (it->path().extension() == ".json" && !referenced.count(name)) {
            ++report.checked;
            report.failed.push_back({name, "object not referenced by index"});
        }
    }
    return report;
}

} // namespace provbench
