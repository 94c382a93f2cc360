#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace trendlex {

using Vector = std::vector<double>;

/// Provider output for one input text.
struct SequenceEmbedding {
    std::vector<std::string> tokens;  // provider tokens, possibly word pieces
    std::vector<Vector> last_layer;   // one vector per token
    Vector pooled;

    bool operator==(const SequenceEmbedding&) const = default;
};

/// Contextual embedder behind the wire protocol. Implementations must be
/// deterministic and safe to call concurrently.
class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;

    virtual std::size_t dim() const = 0;
    virtual std::size_t layers() const = 0;
    virtual std::size_t max_tokens() const = 0;
    virtual std::string describe() const = 0;

    virtual std::vector<SequenceEmbedding> embed(std::span<const std::string> texts) const = 0;
};

struct StubOptions {
    std::uint64_t seed = 42;
    std::size_t dim = 768;
    std::size_t layers = 12;
    std::size_t max_tokens = 512;
    // Share of each component drawn from the (token, position) hash; the rest
    // comes from the token alone, so repeated words stay correlated.
    double position_mix = 0.25;
};

/// Whitespace-tokenizing provider whose vectors come from a seeded hash of
/// (token, position) mapped into [-1, 1]^dim. Pooled = mean of token vectors.
class StubProvider final : public EmbeddingProvider {
public:
    explicit StubProvider(StubOptions options = {});

    std::size_t dim() const override { return options_.dim; }
    std::size_t layers() const override { return options_.layers; }
    std::size_t max_tokens() const override { return options_.max_tokens; }
    std::string describe() const override;

    std::vector<SequenceEmbedding> embed(std::span<const std::string> texts) const override;

    SequenceEmbedding embed_one(std::string_view text) const;
    Vector token_vector(std::string_view token, std::size_t position) const;

private:
    StubOptions options_;
};

/// Replays a recorded-response cache (JSON-lines of {"request","response"}).
class FileProvider final : public EmbeddingProvider {
public:
    explicit FileProvider(const std::string& path, std::size_t max_tokens = 512);

    std::size_t dim() const override { return dim_; }
    std::size_t layers() const override { return layers_; }
    std::size_t max_tokens() const override { return max_tokens_; }
    std::string describe() const override { return "file:" + path_; }

    /// Throws CacheMiss naming the first text without a recorded response.
    std::vector<SequenceEmbedding> embed(std::span<const std::string> texts) const override;

    std::size_t entries() const noexcept { return cache_.size(); }

private:
    std::string path_;
    std::size_t dim_ = 0;
    std::size_t layers_ = 0;
    std::size_t max_tokens_;
    std::unordered_map<std::string, SequenceEmbedding> cache_;
};

struct RemoteOptions {
    std::chrono::milliseconds timeout{30000};
    std::size_t batch_size = 64;
    std::size_t max_tokens = 512;
};

/// Speaks POST /v1/embed to a sidecar. Transport failures, HTTP errors and
/// malformed bodies raise TransportError.
class RemoteProvider final : public EmbeddingProvider {
public:
    explicit RemoteProvider(std::string endpoint, RemoteOptions options = {});

    std::size_t dim() const override { return dim_.load(); }
    std::size_t layers() const override { return layers_.load(); }
    std::size_t max_tokens() const override { return options_.max_tokens; }
    std::string describe() const override { return "http:" + endpoint_; }

    std::vector<SequenceEmbedding> embed(std::span<const std::string> texts) const override;

    const std::string& endpoint() const noexcept { return endpoint_; }

private:
    std::vector<SequenceEmbedding> post_batch(std::span<const std::string> texts) const;

    std::string endpoint_;
    RemoteOptions options_;
    mutable std::atomic<std::size_t> dim_{0};
    mutable std::atomic<std::size_t> layers_{0};
};

/// Forwards to an inner provider and appends every request/response pair to
/// a cache file that FileProvider can replay.
class RecordingProvider final : public EmbeddingProvider {
public:
    RecordingProvider(std::shared_ptr<const EmbeddingProvider> inner, std::string path);

    std::size_t dim() const override { return inner_->dim(); }
    std::size_t layers() const override { return inner_->layers(); }
    std::size_t max_tokens() const override { return inner_->max_tokens(); }
    std::string describe() const override { return inner_->describe(); }

    std::vector<SequenceEmbedding> embed(std::span<const std::string> texts) const override;

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    std::string path_;
    mutable std::mutex mutex_;
};

/// Wire-format helpers shared by the providers and the test sidecar.
std::string render_embed_request(std::span<const std::string> texts);
std::vector<std::string> parse_embed_request(std::string_view body);
std::string render_embed_response(std::size_t dim, std::size_t layers,
                                  std::span<const SequenceEmbedding> results);
/// Validates shape (token/vector counts, dims); throws TransportError.
std::vector<SequenceEmbedding> parse_embed_response(std::string_view body, std::size_t* dim,
                                                    std::size_t* layers);

/// "stub:<seed>", "file:<path>" or "http:<url>".
std::shared_ptr<const EmbeddingProvider> make_provider(std::string_view spec);

/// Per-word final-layer vectors: a word split into pieces gets the mean of
/// its piece vectors. Special tokens ([CLS], [SEP], ...) are skipped.
std::vector<Vector> align_to_words(const SequenceEmbedding& embedding,
                                   std::span<const std::string> words);

}  // namespace trendlex
