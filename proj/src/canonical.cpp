#include "provbench/canonical.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "provbench/errors.hpp"

namespace provbench {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out.push_back('"');
    for (unsigned char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\b': out += "\\b"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\f': out += "\\f"; break;
            case '\r': out += "\\r"; break;
            default:
                if (c < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(static_cast<char>(c));
                }
        }
    }
    out.push_back('"');
}

void write_canonical(std::string& out, const Json& value) {
    switch (value.type()) {
        case Json::value_t::null:
            out += "null";
            break;
        case Json::value_t::boolean:
            out += value.get<bool>() ? "true" : "false";
            break;
        case Json::value_t::number_integer: {
            char buf[24];
            auto res = std::to_chars(buf, buf + sizeof(buf), value.get<std::int64_t>());
            out.append(buf, res.ptr);
            break;
        }
        case Json::value_t::number_unsigned: {
            char buf[24];
            auto res = std::to_chars(buf, buf + sizeof(buf), value.get<std::uint64_t>());
            out.append(buf, res.ptr);
            break;
        }
        case Json::value_t::number_float:
            out += canonical_number(value.get<double>());
            break;
        case Json::value_t::string:
            append_escaped(out, value.get_ref<const std::string&>());
            break;
        case Json::value_t::array: {
            out.push_back('[');
            bool first = true;
            for (const auto& item : value) {
                if (!first) out.push_back(',');
                first = false;
                write_canonical(out, item);
            }
            out.push_back(']');
            break;
        }
        case Json::value_t::object: {
            // nlohmann's object_t is a std::map keyed by std::string, so
            // iteration order is already UTF-8 byte order.
            out.push_back('{');
            bool first = true;
            for (auto it = value.begin(); it != value.end(); ++it) {
                if (!first) out.push_back(',');
                first = false;
                append_escaped(out, it.key());
                out.push_back(':');
                write_canonical(out, it.value());
            }
            out.push_back('}');
            break;
        }
        default:
            throw Error(ErrorKind::SchemaError, "unsupported value type in document");
    }
}

// SAX handler that builds a DOM while rejecting duplicate object keys.
class StrictBuilder {
public:
    Json result;

    bool null() { return emit(Json(nullptr)); }
    bool boolean(bool v) { return emit(Json(v)); }
    bool number_integer(std::int64_t v) { return emit(Json(v)); }
    bool number_unsigned(std::uint64_t v) { return emit(Json(v)); }
    bool number_float(double v, const std::string&) { return emit(Json(v)); }
    bool string(std::string& v) { return emit(Json(v)); }
    bool binary(Json::binary_t&) {
        throw Error(ErrorKind::SchemaError, "binary values are not valid JSON");
    }

    bool start_object(std::size_t) {
        stack_.push_back(Frame{Json(Json::value_t::object), {}, {}});
        return true;
    }
    bool key(std::string& k) {
        Frame& frame = stack_.back();
        if (frame.value.contains(k)) {
            throw Error(ErrorKind::DuplicateKey, "duplicate object key: " + k);
        }
        frame.pending_key = k;
        return true;
    }
    bool end_object() { return pop(); }

    bool start_array(std::size_t) {
        stack_.push_back(Frame{Json(Json::value_t::array), {}, {}});
        return true;
    }
    bool end_array() { return pop(); }

    bool parse_error(std::size_t position, const std::string&,
                     const nlohmann::detail::exception& ex) {
        throw Error(ErrorKind::SchemaError,
                    "JSON parse error at byte " + std::to_string(position) + ": " + ex.what());
    }

private:
    struct Frame {
        Json value;
        std::string pending_key;
        bool unused = false;
    };

    std::vector<Frame> stack_;

    bool emit(Json v) {
        if (stack_.empty()) {
            result = std::move(v);
            return true;
        }
        Frame& frame = stack_.back();
        if (frame.value.is_array()) {
            frame.value.push_back(std::move(v));
        } else {
            frame.value[frame.pending_key] = std::move(v);
        }
        return true;
    }

    bool pop() {
        Json done = std::move(stack_.back().value);
        stack_.pop_back();
        return emit(std::move(done));
    }
};

} // namespace

std::string canonical_number(double value) {
    if (!std::isfinite(value)) {
        throw Error(ErrorKind::NonFiniteNumber, "non-finite number has no canonical form");
    }
    if (value == 0.0) {
        return "0"; // covers -0 as well
    }

    std::string out;
    if (value < 0.0) {
        out.push_back('-');
        value = -value;
    }

    // Shortest round-trip digits via to_chars, then ECMAScript notation.
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific);
    std::string_view sci(buf, static_cast<std::size_t>(res.ptr - buf));
    const auto epos = sci.find('e');
    std::string digits;
    for (char c : sci.substr(0, epos)) {
        if (c != '.') digits.push_back(c);
    }
    // to_chars writes "e+NN" for non-negative exponents; from_chars does not
    // accept the '+'.
    std::size_t expat = epos + 1;
    if (sci[expat] == '+') ++expat;
    int exp10 = 0;
    std::from_chars(sci.data() + expat, sci.data() + sci.size(), exp10);

    // value = 0.d1...dk * 10^n
    const int n = exp10 + 1;
    const int k = static_cast<int>(digits.size());

    if (k <= n && n <= 21) {
        out += digits;
        out.append(static_cast<std::size_t>(n - k), '0');
    } else if (0 < n && n <= 21) {
        out += digits.substr(0, static_cast<std::size_t>(n));
        out.push_back('.');
        out += digits.substr(static_cast<std::size_t>(n));
    } else if (-6 < n && n <= 0) {
        out += "0.";
        out.append(static_cast<std::size_t>(-n), '0');
        out += digits;
    } else {
        out += digits.substr(0, 1);
        if (k > 1) {
            out.push_back('.');
            out += digits.substr(1);
        }
        out.push_back('e');
        out.push_back(n - 1 >= 0 ? '+' : '-');
        out += std::to_string(std::abs(n - 1));
    }
    return out;
}

std::string canonicalize(const Json& doc) {
    std::string out;
    write_canonical(out, doc);
    return out;
}

Json parse_json_strict(const std::string& text) {
    StrictBuilder builder;
    Json::sax_parse(text, &builder);
    return std::move(builder.result);
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::StoreWriteFailure, "SHA-256 digest computation failed");
    }
    static const char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[(md[i] >> 4) & 0x0f]);
        out.push_back(hex[md[i] & 0x0f]);
    }
    return out;
}

std::string content_address(const Json& doc) {
    return sha256_hex(canonicalize(doc));
}

const char* error_kind_name(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::NonFiniteNumber: return "NonFiniteNumber";
        case ErrorKind::DuplicateKey: return "DuplicateKey";
        case ErrorKind::UnknownParent: return "UnknownParent";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::IntegrityMismatch: return "IntegrityMismatch";
        case ErrorKind::StoreReadFailure: return "StoreReadFailure";
        case ErrorKind::StoreWriteFailure: return "StoreWriteFailure";
        case ErrorKind::DanglingParent: return "DanglingParent";
        case ErrorKind::CycleDetected: return "CycleDetected";
        case ErrorKind::NotInGraph: return "NotInGraph";
        case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::UnpairedItem: return "UnpairedItem";
        case ErrorKind::UnknownChannel: return "UnknownChannel";
        case ErrorKind::DuplicateId: return "DuplicateId";
        case ErrorKind::MissingSummary: return "MissingSummary";
        case ErrorKind::NonPositiveWindow: return "NonPositiveWindow";
        case ErrorKind::ChannelMismatch: return "ChannelMismatch";
        case ErrorKind::EmptyChannelSet: return "EmptyChannelSet";
        case ErrorKind::NoPreset: return "NoPreset";
        case ErrorKind::MissingWeights: return "MissingWeights";
        case ErrorKind::EmptySide: return "EmptySide";
        case ErrorKind::EmptyPairs: return "EmptyPairs";
        case ErrorKind::TooFewPairs: return "TooFewPairs";
        case ErrorKind::SingleClass: return "SingleClass";
        case ErrorKind::EmptySample: return "EmptySample";
        case ErrorKind::NoPositives: return "NoPositives";
        case ErrorKind::ZeroVarianceColumn: return "ZeroVarianceColumn";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::KindMismatch: return "KindMismatch";
        case ErrorKind::KTooLarge: return "KTooLarge";
        case ErrorKind::MissingArtifact: return "MissingArtifact";
        case ErrorKind::Usage: return "Usage";
    }
    return "Unknown";
}

} // namespace provbench
