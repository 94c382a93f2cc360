#include "trendlex/provider.hpp"

#include <httplib.h>

#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "trendlex/error.hpp"
#include "trendlex/text.hpp"

namespace trendlex {

using nlohmann::json;

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = kFnvOffset) {
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::uint64_t mix64(std::uint64_t h, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xFF;
        h *= kFnvPrime;
    }
    return h;
}

struct SplitMix64 {
    std::uint64_t state;
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // Uniform in [-1, 1].
    double symmetric() { return static_cast<double>(next() >> 11) * (2.0 / 9007199254740991.0) - 1.0; }
};

}  // namespace

StubProvider::StubProvider(StubOptions options) : options_(options) {
    if (options_.dim == 0) throw InvalidArgument("stub dim must be positive");
    if (options_.position_mix < 0.0 || options_.position_mix > 1.0)
        throw InvalidArgument("stub position_mix must be in [0, 1]");
}

std::string StubProvider::describe() const { return "stub:" + std::to_string(options_.seed); }

Vector StubProvider::token_vector(std::string_view token, std::size_t position) const {
    const auto token_hash = fnv1a(token, mix64(kFnvOffset, options_.seed));
    SplitMix64 base{token_hash};
    SplitMix64 positional{mix64(token_hash, static_cast<std::uint64_t>(position) + 1)};
    const double mix = options_.position_mix;
    Vector v(options_.dim);
    for (auto& x : v) x = (1.0 - mix) * base.symmetric() + mix * positional.symmetric();
    return v;
}

SequenceEmbedding StubProvider::embed_one(std::string_view text) const {
    SequenceEmbedding out;
    out.tokens = text::split_words(text);
    out.last_layer.reserve(out.tokens.size());
    out.pooled.assign(options_.dim, 0.0);
    for (std::size_t i = 0; i < out.tokens.size(); ++i) {
        out.last_layer.push_back(token_vector(out.tokens[i], i));
        for (std::size_t k = 0; k < options_.dim; ++k) out.pooled[k] += out.last_layer.back()[k];
    }
    if (!out.tokens.empty())
        for (auto& x : out.pooled) x /= static_cast<double>(out.tokens.size());
    return out;
}

std::vector<SequenceEmbedding> StubProvider::embed(std::span<const std::string> texts) const {
    std::vector<SequenceEmbedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

// ---- wire format ---------------------------------------------------------

std::string render_embed_request(std::span<const std::string> texts) {
    json j;
    j["texts"] = json::array();
    for (const auto& t : texts) j["texts"].push_back(t);
    return j.dump();
}

std::vector<std::string> parse_embed_request(std::string_view body) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw InvalidArgument(std::string("malformed request: ") + e.what());
    }
    if (!j.is_object() || !j.contains("texts") || !j["texts"].is_array())
        throw InvalidArgument("request must be {\"texts\": [string...]}");
    std::vector<std::string> out;
    for (const auto& t : j["texts"]) {
        if (!t.is_string()) throw InvalidArgument("texts must be strings");
        out.push_back(t.get<std::string>());
    }
    return out;
}

namespace {

json result_to_json(const SequenceEmbedding& r) {
    json j;
    j["tokens"] = r.tokens;
    j["last_layer"] = r.last_layer;
    j["pooled"] = r.pooled;
    return j;
}

json response_to_json(std::size_t dim, std::size_t layers, std::span<const SequenceEmbedding> results) {
    json j;
    j["dim"] = dim;
    j["layers"] = layers;
    j["results"] = json::array();
    for (const auto& r : results) j["results"].push_back(result_to_json(r));
    return j;
}

Vector read_vector(const json& j, std::size_t dim, const char* what) {
    if (!j.is_array()) throw TransportError(std::string(what) + " must be an array");
    if (j.size() != dim)
        throw TransportError(std::string(what) + " has " + std::to_string(j.size()) + " values, expected dim " +
                             std::to_string(dim));
    Vector v;
    v.reserve(dim);
    for (const auto& x : j) {
        if (!x.is_number()) throw TransportError(std::string(what) + " holds a non-number");
        const double d = x.get<double>();
        if (!std::isfinite(d)) throw TransportError(std::string(what) + " holds a non-finite value");
        v.push_back(d);
    }
    return v;
}

std::vector<SequenceEmbedding> results_from_json(const json& j, std::size_t* dim_out, std::size_t* layers_out) {
    if (!j.is_object() || !j.contains("dim") || !j.contains("layers") || !j.contains("results"))
        throw TransportError("response must carry dim, layers and results");
    if (!j["dim"].is_number_unsigned() || !j["layers"].is_number_unsigned() || !j["results"].is_array())
        throw TransportError("response field types are wrong");
    const auto dim = j["dim"].get<std::size_t>();
    const auto layers = j["layers"].get<std::size_t>();
    if (dim == 0) throw TransportError("response dim is zero");
    std::vector<SequenceEmbedding> out;
    for (const auto& r : j["results"]) {
        if (!r.is_object() || !r.contains("tokens") || !r.contains("last_layer") || !r.contains("pooled"))
            throw TransportError("result must carry tokens, last_layer and pooled");
        SequenceEmbedding e;
        if (!r["tokens"].is_array() || !r["last_layer"].is_array())
            throw TransportError("tokens and last_layer must be arrays");
        for (const auto& t : r["tokens"]) {
            if (!t.is_string()) throw TransportError("tokens must be strings");
            e.tokens.push_back(t.get<std::string>());
        }
        if (r["last_layer"].size() != e.tokens.size())
            throw TransportError("last_layer has " + std::to_string(r["last_layer"].size()) + " rows for " +
                                 std::to_string(e.tokens.size()) + " tokens");
        for (const auto& row : r["last_layer"]) e.last_layer.push_back(read_vector(row, dim, "last_layer row"));
        e.pooled = read_vector(r["pooled"], dim, "pooled");
        out.push_back(std::move(e));
    }
    if (dim_out) *dim_out = dim;
    if (layers_out) *layers_out = layers;
    return out;
}

}  // namespace

std::string render_embed_response(std::size_t dim, std::size_t layers, std::span<const SequenceEmbedding> results) {
    return response_to_json(dim, layers, results).dump();
}

std::vector<SequenceEmbedding> parse_embed_response(std::string_view body, std::size_t* dim, std::size_t* layers) {
    json j;
    try {
        j = json::parse(body);
    } catch (const json::parse_error& e) {
        throw TransportError(std::string("malformed response body: ") + e.what());
    }
    return results_from_json(j, dim, layers);
}

// ---- file provider -------------------------------------------------------

FileProvider::FileProvider(const std::string& path, std::size_t max_tokens)
    : path_(path), max_tokens_(max_tokens) {
    std::istringstream in(text::read_file(path));
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (text::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(path, no, e.what());
        }
        if (!j.is_object() || !j.contains("request") || !j.contains("response"))
            throw ParseError(path, no, "expected {\"request\", \"response\"}");
        std::vector<std::string> texts;
        std::vector<SequenceEmbedding> results;
        std::size_t dim = 0, layers = 0;
        try {
            texts = parse_embed_request(j["request"].dump());
            results = results_from_json(j["response"], &dim, &layers);
        } catch (const Error& e) {
            throw ParseError(path, no, e.what());
        }
        if (texts.size() != results.size()) throw ParseError(path, no, "request/response size mismatch");
        if (dim_ == 0) {
            dim_ = dim;
            layers_ = layers;
        } else if (dim != dim_ || layers != layers_) {
            throw ParseError(path, no, "inconsistent dim/layers across recorded responses");
        }
        for (std::size_t i = 0; i < texts.size(); ++i) cache_.insert_or_assign(texts[i], std::move(results[i]));
    }
}

std::vector<SequenceEmbedding> FileProvider::embed(std::span<const std::string> texts) const {
    std::vector<SequenceEmbedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
        auto it = cache_.find(t);
        if (it == cache_.end()) throw CacheMiss("no recorded response for sequence \"" + t + "\" in " + path_);
        out.push_back(it->second);
    }
    return out;
}

// ---- remote provider -----------------------------------------------------

namespace {

struct Endpoint {
    std::string origin;  // scheme://host:port
    std::string prefix;  // path before /v1/embed, no trailing slash
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    const auto path_at = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Endpoint e{path_at == std::string::npos ? url : url.substr(0, path_at),
               path_at == std::string::npos ? std::string{} : url.substr(path_at)};
    while (!e.prefix.empty() && e.prefix.back() == '/') e.prefix.pop_back();
    return e;
}

}  // namespace

RemoteProvider::RemoteProvider(std::string endpoint, RemoteOptions options)
    : endpoint_(std::move(endpoint)), options_(options) {
    if (endpoint_.rfind("http://", 0) != 0)
        throw InvalidArgument("remote embedder endpoint must start with http://: " + endpoint_);
    if (options_.batch_size == 0) options_.batch_size = 1;
}

std::vector<SequenceEmbedding> RemoteProvider::post_batch(std::span<const std::string> texts) const {
    const auto ep = split_endpoint(endpoint_);
    httplib::Client client(ep.origin);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options_.timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options_.timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());

    auto res = client.Post(ep.prefix + "/v1/embed", render_embed_request(texts), "application/json");
    if (!res) throw TransportError("embedder " + endpoint_ + " unreachable: " + httplib::to_string(res.error()));
    if (res->status != 200) {
        std::string message = res->body;
        try {
            auto j = json::parse(res->body);
            if (j.is_object() && j.contains("error") && j["error"].is_string()) message = j["error"].get<std::string>();
        } catch (const json::parse_error&) {
        }
        throw TransportError("embedder returned HTTP " + std::to_string(res->status) + ": " + message);
    }
    std::size_t dim = 0, layers = 0;
    auto results = parse_embed_response(res->body, &dim, &layers);
    if (results.size() != texts.size())
        throw TransportError("embedder returned " + std::to_string(results.size()) + " results for " +
                             std::to_string(texts.size()) + " texts");
    std::size_t expected = 0;
    if (!dim_.compare_exchange_strong(expected, dim) && expected != dim)
        throw TransportError("embedder changed dim from " + std::to_string(expected) + " to " + std::to_string(dim));
    layers_.store(layers);
    return results;
}

std::vector<SequenceEmbedding> RemoteProvider::embed(std::span<const std::string> texts) const {
    std::vector<SequenceEmbedding> out;
    out.reserve(texts.size());
    for (std::size_t i = 0; i < texts.size(); i += options_.batch_size) {
        auto batch = post_batch(texts.subspan(i, std::min(options_.batch_size, texts.size() - i)));
        for (auto& r : batch) out.push_back(std::move(r));
    }
    return out;
}

// ---- recording -----------------------------------------------------------

RecordingProvider::RecordingProvider(std::shared_ptr<const EmbeddingProvider> inner, std::string path)
    : inner_(std::move(inner)), path_(std::move(path)) {
    if (!inner_) throw InvalidArgument("recording provider needs an inner provider");
}

std::vector<SequenceEmbedding> RecordingProvider::embed(std::span<const std::string> texts) const {
    auto results = inner_->embed(texts);
    json line;
    line["request"] = json::parse(render_embed_request(texts));
    line["response"] = response_to_json(inner_->dim(), inner_->layers(), results);
    std::lock_guard lock(mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw Error("cannot append to " + path_);
    out << line.dump() << '\n';
    return results;
}

// ---- factory and alignment -------------------------------------------------

std::shared_ptr<const EmbeddingProvider> make_provider(std::string_view spec) {
    auto colon = spec.find(':');
    if (colon == std::string_view::npos)
        throw InvalidArgument("embedder spec must be stub:<seed>, file:<path> or http:<url>");
    const auto kind = spec.substr(0, colon);
    const auto arg = std::string(spec.substr(colon + 1));
    if (kind == "stub") {
        StubOptions o;
        try {
            std::size_t used = 0;
            o.seed = std::stoull(arg, &used);
            if (used != arg.size()) throw std::invalid_argument(arg);
        } catch (const std::exception&) {
            throw InvalidArgument("stub seed must be an unsigned integer: " + arg);
        }
        return std::make_shared<StubProvider>(o);
    }
    if (kind == "file") return std::make_shared<FileProvider>(arg);
    if (kind == "http") {
        // Accept "http:<host:port>", "http://host:port" and "http:http://host:port".
        std::string url;
        if (arg.rfind("//", 0) == 0) url = "http:" + arg;
        else if (arg.rfind("http://", 0) == 0) url = arg;
        else url = "http://" + arg;
        return std::make_shared<RemoteProvider>(url);
    }
    throw InvalidArgument("unknown embedder kind \"" + std::string(kind) + "\"");
}

namespace {

bool is_special(const std::string& t) {
    return t == "[CLS]" || t == "[SEP]" || t == "[PAD]" || t == "<s>" || t == "</s>" || t == "<pad>";
}

std::string piece_text(const std::string& t) {
    if (t.rfind("##", 0) == 0) return t.substr(2);
    if (t.rfind("\xE2\x96\x81", 0) == 0) return t.substr(3);  // sentencepiece word boundary
    return t;
}

}  // namespace

std::vector<Vector> align_to_words(const SequenceEmbedding& e, std::span<const std::string> words) {
    std::vector<std::size_t> pieces;
    for (std::size_t i = 0; i < e.tokens.size(); ++i)
        if (!is_special(e.tokens[i])) pieces.push_back(i);

    auto mean_of = [&](std::size_t from, std::size_t to) {
        Vector v(e.last_layer[pieces[from]].size(), 0.0);
        for (std::size_t p = from; p < to; ++p)
            for (std::size_t k = 0; k < v.size(); ++k) v[k] += e.last_layer[pieces[p]][k];
        for (auto& x : v) x /= static_cast<double>(to - from);
        return v;
    };

    std::vector<Vector> out;
    out.reserve(words.size());
    std::size_t p = 0;
    bool aligned = true;
    for (const auto& word : words) {
        if (p >= pieces.size()) {
            aligned = false;
            break;
        }
        const auto target = text::lower(word);
        std::string acc;
        const std::size_t from = p;
        if (e.tokens[pieces[p]] == "[UNK]") {
            ++p;
        } else {
            while (p < pieces.size() && acc.size() < target.size()) acc += text::lower(piece_text(e.tokens[pieces[p++]]));
            if (acc != target) {
                aligned = false;
                break;
            }
        }
        out.push_back(mean_of(from, p));
    }
    if (aligned && p == pieces.size()) return out;

    // Normalizing tokenizers (accent stripping) can defeat string matching;
    // fall back to 1:1 when the counts agree.
    if (pieces.size() == words.size()) {
        out.clear();
        for (std::size_t i = 0; i < pieces.size(); ++i) out.push_back(e.last_layer[pieces[i]]);
        return out;
    }
    throw TransportError("cannot align " + std::to_string(pieces.size()) + " provider tokens to " +
                         std::to_string(words.size()) + " words");
}

}  // namespace trendlex
