#include "provbench/embedding.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "provbench/canonical.hpp"
#include "provbench/errors.hpp"

namespace provbench {

namespace {

double parse_cell(const std::string& cell, const std::string& where) {
    try {
        std::size_t used = 0;
        const double v = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        if (!std::isfinite(v))
            throw Error(ErrorKind::NonFiniteNumber, where + ": non-finite value");
        return v;
    } catch (const Error&) {
        throw;
    } catch (const std::exception&) {
        throw Error(ErrorKind::SchemaError, where + ": not a number: " + cell);
    }
}

} // namespace

FeatureMatrix load_feature_matrix(const std::filesystem::path& csv) {
    const auto rows = detail::parse_csv(detail::slurp(csv));
    if (rows.size() < 3)
        throw Error(ErrorKind::SchemaError, "feature matrix needs a header and at least 2 rows");
    const auto& header = rows.front();
    if (header.size() < 3 || header[0] != "id" || header[1] != "class")
        throw Error(ErrorKind::SchemaError, "feature matrix header must start id,class");

    FeatureMatrix X;
    std::set<std::string> seen_columns;
    for (std::size_t c = 2; c < header.size(); ++c) {
        if (!seen_columns.insert(header[c]).second)
            throw Error(ErrorKind::SchemaError, "duplicate descriptor column " + header[c]);
        X.columns.push_back(header[c]);
    }

    struct Row {
        std::string id;
        std::string label;
        std::vector<double> values;
    };
    std::vector<Row> parsed;
    std::set<std::string> seen_ids;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw Error(ErrorKind::SchemaError,
                        "feature row " + std::to_string(r + 1) + " has wrong field count");
        Row parsed_row;
        parsed_row.id = row[0];
        parsed_row.label = row[1];
        if (!seen_ids.insert(parsed_row.id).second)
            throw Error(ErrorKind::DuplicateId, "duplicate feature row id " + parsed_row.id);
        for (std::size_t c = 2; c < row.size(); ++c)
            parsed_row.values.push_back(
                parse_cell(row[c], "row " + parsed_row.id + " column " + header[c]));
        parsed.push_back(std::move(parsed_row));
    }
    std::sort(parsed.begin(), parsed.end(), [](const Row& a, const Row& b) { return a.id < b.id; });

    X.values.resize(static_cast<Eigen::Index>(parsed.size()),
                    static_cast<Eigen::Index>(X.columns.size()));
    for (std::size_t r = 0; r < parsed.size(); ++r) {
        X.row_ids.push_back(parsed[r].id);
        X.class_labels.push_back(parsed[r].label);
        for (std::size_t c = 0; c < parsed[r].values.size(); ++c)
            X.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                parsed[r].values[c];
    }
    return X;
}

HarmonicTransform load_transform(const std::filesystem::path& csv) {
    const auto rows = detail::parse_csv(detail::slurp(csv));
    if (rows.size() < 2 || rows.front().size() < 3)
        throw Error(ErrorKind::SchemaError, "transform needs named rows and at least 2 channels");
    const auto& header = rows.front();

    HarmonicTransform T;
    for (std::size_t c = 1; c < header.size(); ++c) T.channels.push_back(header[c]);
    T.matrix.resize(static_cast<Eigen::Index>(rows.size() - 1),
                    static_cast<Eigen::Index>(T.channels.size()));
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != header.size())
            throw Error(ErrorKind::SchemaError,
                        "transform row " + std::to_string(r + 1) + " has wrong field count");
        T.input_columns.push_back(row[0]);
        for (std::size_t c = 1; c < row.size(); ++c)
            T.matrix(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c - 1)) =
                parse_cell(row[c], "transform row " + row[0]);
    }
    return T;
}

std::vector<BitFingerprint> load_fingerprints(const std::filesystem::path& file) {
    std::istringstream in(detail::slurp(file));
    std::vector<BitFingerprint> prints;
    std::string line;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream fields(line);
        BitFingerprint fp;
        std::string hex;
        if (!(fields >> fp.id >> hex))
            throw Error(ErrorKind::SchemaError, "fingerprint lines are '<id> <hex>'");
        fp.width = hex.size() * 4;
        fp.words.assign((fp.width + 63) / 64, 0);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const char c = hex[i];
            std::uint64_t nibble = 0;
            if (c >= '0' && c <= '9') nibble = static_cast<std::uint64_t>(c - '0');
            else if (c >= 'a' && c <= 'f') nibble = static_cast<std::uint64_t>(c - 'a' + 10);
            else if (c >= 'A' && c <= 'F') nibble = static_cast<std::uint64_t>(c - 'A' + 10);
            else throw Error(ErrorKind::SchemaError, fp.id + ": bad hex digit");
            const std::size_t bit = i * 4;
            fp.words[bit / 64] |= nibble << (bit % 64);
        }
        if (width == 0) width = fp.width;
        else if (width != fp.width)
            throw Error(ErrorKind::DimensionMismatch, "fingerprint widths differ");
        prints.push_back(std::move(fp));
    }
    return prints;
}

Json feature_matrix_to_json(const FeatureMatrix& X) {
    Json doc = Json::object();
    doc["row_ids"] = X.row_ids;
    doc["class_labels"] = X.class_labels;
    doc["columns"] = X.columns;
    Json values = Json::array();
    for (Eigen::Index r = 0; r < X.values.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < X.values.cols(); ++c) row.push_back(X.values(r, c));
        values.push_back(row);
    }
    doc["values"] = values;
    return doc;
}

FeatureMatrix feature_matrix_from_json(const Json& doc) {
    FeatureMatrix X;
    try {
        X.row_ids = doc.at("row_ids").get<std::vector<std::string>>();
        X.class_labels = doc.at("class_labels").get<std::vector<std::string>>();
        X.columns = doc.at("columns").get<std::vector<std::string>>();
        const Json& values = doc.at("values");
        X.values.resize(static_cast<Eigen::Index>(values.size()),
                        static_cast<Eigen::Index>(X.columns.size()));
        for (std::size_t r = 0; r < values.size(); ++r)
            for (std::size_t c = 0; c < X.columns.size(); ++c)
                X.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    values.at(r).at(c).get<double>();
    } catch (const Json::exception& e) {
        throw Error(ErrorKind::SchemaError, std::string("malformed feature matrix: ") + e.what());
    }
    return X;
}

Json embedding_to_json(const Embedding& embedding) {
    Json doc = Json::object();
    doc["row_ids"] = embedding.row_ids;
    Json vectors = Json::array();
    for (Eigen::Index r = 0; r < embedding.vectors.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < embedding.vectors.cols(); ++c)
            row.push_back(embedding.vectors(r, c));
        vectors.push_back(row);
    }
    doc["vectors"] = vectors;
    return doc;
}

Embedding embedding_from_json(const Json& doc) {
    Embedding e;
    try {
        e.row_ids = doc.at("row_ids").get<std::vector<std::string>>();
        const Json& vectors = doc.at("vectors");
        const Eigen::Index cols =
            vectors.empty() ? 0 : static_cast<Eigen::Index>(vectors.at(0).size());
        e.vectors.resize(static_cast<Eigen::Index>(vectors.size()), cols);
        for (std::size_t r = 0; r < vectors.size(); ++r)
            for (Eigen::Index c = 0; c < cols; ++c)
                e.vectors(static_cast<Eigen::Index>(r), c) =
                    vectors.at(r).at(static_cast<std::size_t>(c)).get<double>();
    } catch (const Json::exception& e2) {
        throw Error(ErrorKind::SchemaError, std::string("malformed embedding: ") + e2.what());
    }
    return e;
}

Embedding build_embedding(const FeatureMatrix& X, const HarmonicTransform& T) {
    if (X.values.rows() < 2)
        throw Error(ErrorKind::SchemaError, "feature matrix needs at least 2 rows");
    if (static_cast<std::size_t>(X.values.cols()) != X.columns.size())
        throw Error(ErrorKind::DimensionMismatch, "feature matrix shape mismatch");
    if (X.values.cols() != T.matrix.rows() || X.columns.size() != T.input_columns.size())
        throw Error(ErrorKind::DimensionMismatch, "transform rows do not match descriptor count");
    for (std::size_t c = 0; c < X.columns.size(); ++c)
        if (X.columns[c] != T.input_columns[c])
            throw Error(ErrorKind::DimensionMismatch,
                        "transform row " + T.input_columns[c] + " does not match column " +
                            X.columns[c]);

    const double n = static_cast<double>(X.values.rows());
    Eigen::MatrixXd Z = X.values;
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
        const double mean = Z.col(c).mean();
        const double var = (Z.col(c).array() - mean).square().sum() / n;
        if (var == 0.0)
            throw Error(ErrorKind::ZeroVarianceColumn,
                        "descriptor column " + X.columns[static_cast<std::size_t>(c)] +
                            " is constant");
        Z.col(c) = (Z.col(c).array() - mean) / std::sqrt(var);
    }

    Embedding out;
    out.row_ids = X.row_ids;
    out.vectors = Z * T.matrix;
    for (Eigen::Index r = 0; r < out.vectors.rows(); ++r) {
        const double norm = out.vectors.row(r).norm();
        if (!(norm > 0.0) || !std::isfinite(norm))
            throw Error(ErrorKind::NonFiniteNumber,
                        "embedding row " + out.row_ids[static_cast<std::size_t>(r)] +
                            " has no direction");
        out.vectors.row(r) /= norm;
    }
    return out;
}

double similarity(const Eigen::VectorXd& a, const Eigen::VectorXd& b, SimilarityKind kind) {
    if (kind != SimilarityKind::cosine)
        throw Error(ErrorKind::KindMismatch, "vector similarity is cosine only");
    if (a.size() != b.size())
        throw Error(ErrorKind::DimensionMismatch, "vectors differ in dimension");
    return a.dot(b);
}

double similarity(const BitFingerprint& a, const BitFingerprint& b, SimilarityKind kind) {
    if (kind != SimilarityKind::tanimoto)
        throw Error(ErrorKind::KindMismatch, "fingerprint similarity is tanimoto only");
    if (a.width != b.width)
        throw Error(ErrorKind::DimensionMismatch, "fingerprint widths differ");
    std::uint64_t inter = 0, uni = 0;
    for (std::size_t w = 0; w < a.words.size(); ++w) {
        inter += static_cast<std::uint64_t>(std::popcount(a.words[w] & b.words[w]));
        uni += static_cast<std::uint64_t>(std::popcount(a.words[w] | b.words[w]));
    }
    if (uni == 0) return 1.0; // two empty sets
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double retrieval_at_k(const Embedding& embedding, const std::vector<std::string>& labels, int k) {
    const auto n = static_cast<std::size_t>(embedding.vectors.rows());
    if (labels.size() != n)
        throw Error(ErrorKind::DimensionMismatch, "labels do not match embedding rows");
    if (k < 1 || static_cast<std::size_t>(k) > n - 1)
        throw Error(ErrorKind::KTooLarge, "k must lie in [1, n-1]");

    const Eigen::MatrixXd sims = embedding.vectors * embedding.vectors.transpose();
    double total = 0.0;
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) {
        order.resize(0);
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) order.push_back(j);
        // ids are sorted ascending, so index order is the documented tie-break
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return sims(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)) >
                   sims(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(b));
        });
        std::size_t same = 0;
        for (int r = 0; r < k; ++r)
            if (labels[order[static_cast<std::size_t>(r)]] == labels[i]) ++same;
        total += static_cast<double>(same) / k;
    }
    return total / static_cast<double>(n);
}

double same_class_nn_rate(const Embedding& embedding, const std::vector<std::string>& labels) {
    return retrieval_at_k(embedding, labels, 1);
}

double expected_shuffled_rate(const std::vector<std::string>& labels) {
    std::map<std::string, std::size_t> counts;
    for (const auto& l : labels) ++counts[l];
    const double n = static_cast<double>(labels.size());
    double expected = 0.0;
    for (const auto& [label, c] : counts)
        expected += static_cast<double>(c) * (static_cast<double>(c) - 1.0);
    return expected / (n * (n - 1.0));
}

NullReport null_controls(const FeatureMatrix& X, const std::vector<std::string>& labels,
                         const HarmonicTransform& T, int k, int n_label_perms, int n_random_maps,
                         const RandomSource& rng) {
    const Embedding embedding = build_embedding(X, T);
    NullReport report;
    report.k = k;
    report.observed = retrieval_at_k(embedding, labels, k);
    report.label_perms = n_label_perms;
    report.random_maps = n_random_maps;

    const RandomSource label_rng = rng.fork("labels");
    std::size_t at_least = 0;
    double label_sum = 0.0;
    for (int d = 0; d < n_label_perms; ++d) {
        std::vector<std::string> shuffled = labels;
        Substream stream = label_rng.substream(static_cast<std::uint64_t>(d));
        stream.shuffle(shuffled);
        const double value = retrieval_at_k(embedding, shuffled, k);
        label_sum += value;
        if (value >= report.observed) ++at_least;
    }
    report.shuffled_label_mean = n_label_perms ? label_sum / n_label_perms : 0.0;
    report.shuffled_label_p = (1.0 + at_least) / (1.0 + n_label_perms);

    const RandomSource map_rng = rng.fork("maps");
    double map_sum = 0.0;
    for (int d = 0; d < n_random_maps; ++d) {
        Substream stream = map_rng.substream(static_cast<std::uint64_t>(d));
        HarmonicTransform random_map = T;
        for (Eigen::Index r = 0; r < random_map.matrix.rows(); ++r)
            for (Eigen::Index c = 0; c < random_map.matrix.cols(); ++c)
                random_map.matrix(r, c) = stream.next_normal();
        map_sum += retrieval_at_k(build_embedding(X, random_map), labels, k);
    }
    report.random_map_mean = n_random_maps ? map_sum / n_random_maps : 0.0;
    return report;
}

Json null_report_to_json(const NullReport& report) {
    Json doc = Json::object();
    doc["observed"] = report.observed;
    doc["k"] = report.k;
    doc["shuffled_label_mean"] = report.shuffled_label_mean;
    doc["shuffled_label_p"] = report.shuffled_label_p;
    doc["label_perms"] = report.label_perms;
    doc["random_map_mean"] = report.random_map_mean;
    doc["random_maps"] = report.random_maps;
    return doc;
}

} // namespace provbench
