#include <doctest.h>

#include <httplib.h>
#include <json.hpp>

#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

#include "support.hpp"
#include "trendlex/error.hpp"
#include "trendlex/provider.hpp"
#include "trendlex/text.hpp"

using namespace trendlex;
using trendlex::testing::TempDir;

namespace {

// In-process stand-in for the embedder sidecar, built on the stub provider.
class FakeSidecar {
public:
    explicit FakeSidecar(StubOptions options = {}) : stub_(options) {
        server_.Post("/v1/embed", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            try {
                auto texts = parse_embed_request(req.body);
                auto results = stub_.embed(texts);
                res.set_content(render_embed_response(stub_.dim(), stub_.layers(), results), "application/json");
            } catch (const InvalidArgument& e) {
                res.status = 422;
                res.set_content(std::string(R"({"error":")") + "bad request" + "\"}", "application/json");
            }
        });
        server_.Post("/down/v1/embed", [](const httplib::Request&, httplib::Response& res) {
            res.status = 503;
            res.set_content(R"({"error":"model not loaded"})", "application/json");
        });
        server_.Post("/garbage/v1/embed", [](const httplib::Request&, httplib::Response& res) {
            res.set_content("{not json", "application/json");
        });
        server_.Post("/short/v1/embed", [this](const httplib::Request&, httplib::Response& res) {
            res.set_content(render_embed_response(stub_.dim(), stub_.layers(), {}), "application/json");
        });
        server_.Post("/slow/v1/embed", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(std::chrono::milliseconds(600));
            res.set_content("{}", "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeSidecar() {
        server_.stop();
        thread_.join();
    }

    std::string url(const std::string& prefix = "") const {
        return "http://127.0.0.1:" + std::to_string(port_) + prefix;
    }
    int requests() const { return requests_; }

private:
    StubProvider stub_;
    httplib::Server server_;
    int port_ = 0;
    std::atomic<int> requests_{0};
    std::thread thread_;
};

const std::vector<std::string> kTexts = {"deep state", "fema camps are the end game", ""};

}  // namespace

TEST_CASE("Stub.DeterministicAndShaped") {
    StubProvider a, b;
    const std::vector<std::string> texts{"deep state"};
    auto x = a.embed(texts), y = a.embed(texts), z = b.embed(texts);
    CHECK_EQ(x, y);
    CHECK_EQ(x, z);
    REQUIRE_EQ(x[0].tokens, (std::vector<std::string>{"deep", "state"}));
    REQUIRE_EQ(x[0].last_layer.size(), 2u);
    CHECK_EQ(a.dim(), 768u);
    CHECK_EQ(a.layers(), 12u);
    CHECK_EQ(a.max_tokens(), 512u);
    for (const auto& v : x[0].last_layer) {
        REQUIRE_EQ(v.size(), 768u);
        for (double d : v) {
            CHECK(std::isfinite(d));
            CHECK_LE(std::abs(d), 1.0);
        }
    }
}

TEST_CASE("Stub.PooledIsMeanOfTokens") {
    StubProvider p;
    auto e = p.embed_one("globalist bankers control");
    for (std::size_t k = 0; k < p.dim(); ++k) {
        const double m = (e.last_layer[0][k] + e.last_layer[1][k] + e.last_layer[2][k]) / 3.0;
        CHECK_NEAR(e.pooled[k], m, 1e-15);
    }
}

TEST_CASE("Stub.SeedAndPositionMatter") {
    StubProvider p42, p7(StubOptions{.seed = 7});
    CHECK_NE(p42.token_vector("state", 0), p7.token_vector("state", 0));
    CHECK_NE(p42.token_vector("state", 0), p42.token_vector("state", 1));
    StubProvider flat(StubOptions{.position_mix = 0.0});
    CHECK_EQ(flat.token_vector("state", 0), flat.token_vector("state", 9));
    CHECK_THROWS_AS(StubProvider(StubOptions{.dim = 0}), InvalidArgument);
    CHECK_THROWS_AS(StubProvider(StubOptions{.position_mix = 1.5}), InvalidArgument);
}

TEST_CASE("Wire.RequestRoundTrip") {
    CHECK_EQ(parse_embed_request(render_embed_request(kTexts)), kTexts);
    CHECK_EQ(nlohmann::json::parse(render_embed_request(kTexts)), nlohmann::json::parse(R"({"texts":["deep state","fema camps are the end game",""]})"));
    CHECK_THROWS_AS(parse_embed_request("{\"texts\": [1]}"), InvalidArgument);
    CHECK_THROWS_AS(parse_embed_request("[]"), InvalidArgument);
}

TEST_CASE("Wire.ResponseRoundTrip") {
    StubProvider p(StubOptions{.dim = 8, .layers = 2});
    auto results = p.embed(kTexts);
    std::size_t dim = 0, layers = 0;
    auto back = parse_embed_response(render_embed_response(8, 2, results), &dim, &layers);
    CHECK_EQ(dim, 8u);
    CHECK_EQ(layers, 2u);
    CHECK_EQ(back, results);
}

TEST_CASE("Wire.ResponseValidation") {
    std::size_t d = 0, l = 0;
    CHECK_THROWS_AS(parse_embed_response("nope", &d, &l), TransportError);
    CHECK_THROWS_AS(parse_embed_response(R"({"dim":2,"layers":1})", &d, &l), TransportError);
    CHECK_THROWS_AS(parse_embed_response(
                     R"({"dim":2,"layers":1,"results":[{"tokens":["a"],"last_layer":[[1,2],[3,4]],"pooled":[1,2]}]})",
                     &d, &l), TransportError);
    CHECK_THROWS_AS(parse_embed_response(
                     R"({"dim":2,"layers":1,"results":[{"tokens":["a"],"last_layer":[[1]],"pooled":[1,2]}]})", &d, &l), TransportError);
    CHECK_NOTHROW(parse_embed_response(
        R"({"dim":2,"layers":1,"results":[{"tokens":["a"],"last_layer":[[1,2]],"pooled":[1,2]}]})", &d, &l));
}

TEST_CASE("FileProvider.ReplaysRecordingByteEqual") {
    TempDir dir;
    const auto cache = dir.file("cache.jsonl");
    auto stub = std::make_shared<StubProvider>();
    RecordingProvider rec(stub, cache);
    const auto live = rec.embed(kTexts);
    FileProvider replay(cache);
    CHECK_EQ(replay.entries(), kTexts.size());
    CHECK_EQ(replay.dim(), 768u);
    CHECK_EQ(replay.layers(), 12u);
    const auto again = replay.embed(kTexts);
    REQUIRE_EQ(again.size(), live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
        REQUIRE_EQ(again[i].pooled.size(), live[i].pooled.size());
        CHECK_EQ(0, std::memcmp(again[i].pooled.data(), live[i].pooled.data(), live[i].pooled.size() * sizeof(double)));
        CHECK_EQ(again[i], live[i]);
    }
    // Recording the replay reproduces the cache file byte for byte.
    const auto second = dir.file("second.jsonl");
    RecordingProvider rerec(std::make_shared<FileProvider>(cache), second);
    rerec.embed(kTexts);
    CHECK_EQ(text::read_file(cache), text::read_file(second));
}

TEST_CASE("FileProvider.CacheMissNamesSequence") {
    TempDir dir;
    RecordingProvider rec(std::make_shared<StubProvider>(), dir.file("c.jsonl"));
    rec.embed(std::vector<std::string>{"deep state"});
    FileProvider replay(dir.file("c.jsonl"));
    try {
        replay.embed(std::vector<std::string>{"world war"});
        FAIL("no exception thrown");
    } catch (const CacheMiss& e) {
        CHECK_NE(std::string(e.what()).find("\"world war\""), std::string::npos);
    }
}

TEST_CASE("FileProvider.MalformedLine") {
    TempDir dir;
    dir.write("c.jsonl", "{\"request\":{\"texts\":[]},\"response\":{\"dim\":1,\"layers\":1,\"results\":[]}}\n{oops\n");
    try {
        FileProvider p(dir.file("c.jsonl"));
        FAIL("no exception thrown");
    } catch (const ParseError& e) {
        CHECK_EQ(e.line(), 2u);
    }
}

TEST_CASE("RemoteProvider.MatchesStubThroughSidecar") {
    FakeSidecar sidecar;
    RemoteProvider remote(sidecar.url(), RemoteOptions{.batch_size = 2});
    auto got = remote.embed(kTexts);
    CHECK_EQ(got, StubProvider().embed(kTexts));
    CHECK_EQ(remote.dim(), 768u);
    CHECK_EQ(remote.layers(), 12u);
    CHECK_EQ(sidecar.requests(), 2);
    CHECK(remote.embed(std::vector<std::string>{}).empty());
}

TEST_CASE("RemoteProvider.FactorySpellings") {
    FakeSidecar sidecar;
    const auto hostport = sidecar.url().substr(7);
    for (const auto& spec : {"http:" + hostport, "http://" + hostport, "http:http://" + hostport}) {
        auto p = make_provider(spec);
        CHECK_EQ(p->describe(), "http:http://" + hostport);
        CHECK_EQ(p->embed(std::vector<std::string>{"deep state"}).size(), 1u);
    }
}

TEST_CASE("RemoteProvider.TypedTransportErrors") {
    FakeSidecar sidecar;
    const std::vector<std::string> one{"deep state"};
    try {
        RemoteProvider(sidecar.url("/down")).embed(one);
        FAIL("no exception thrown");
    } catch (const TransportError& e) {
        CHECK_NE(std::string(e.what()).find("503"), std::string::npos);
        CHECK_NE(std::string(e.what()).find("model not loaded"), std::string::npos);
    }
    CHECK_THROWS_AS(RemoteProvider(sidecar.url("/garbage")).embed(one), TransportError);
    CHECK_THROWS_AS(RemoteProvider(sidecar.url("/short")).embed(one), TransportError);
    CHECK_THROWS_AS(RemoteProvider(sidecar.url("/slow"), RemoteOptions{.timeout = std::chrono::milliseconds(200)}).embed(one), TransportError);
    CHECK_THROWS_AS(RemoteProvider("http://127.0.0.1:1").embed(one), TransportError);
    CHECK_THROWS_AS(RemoteProvider("ftp://x"), InvalidArgument);
}

TEST_CASE("MakeProvider.Specs") {
    CHECK_EQ(make_provider("stub:42")->describe(), "stub:42");
    CHECK_THROWS_AS(make_provider("stub:x"), InvalidArgument);
    CHECK_THROWS_AS(make_provider("stub"), InvalidArgument);
    CHECK_THROWS_AS(make_provider("gpu:0"), InvalidArgument);
    CHECK_THROWS_AS(make_provider("file:/nonexistent/cache.jsonl"), Error);
}

TEST_CASE("AlignToWords.WordPiecesAveraged") {
    SequenceEmbedding e;
    e.tokens = {"[CLS]", "glob", "##alist", "banker", "[SEP]"};
    e.last_layer = {{9, 9}, {1, 2}, {3, 4}, {5, 6}, {9, 9}};
    const std::vector<std::string> words{"globalist", "banker"};
    auto v = align_to_words(e, words);
    REQUIRE_EQ(v.size(), 2u);
    CHECK_EQ(v[0], (Vector{2, 3}));
    CHECK_EQ(v[1], (Vector{5, 6}));
}

TEST_CASE("AlignToWords.OneToOneAndUnknown") {
    SequenceEmbedding e;
    e.tokens = {"[UNK]", "state"};
    e.last_layer = {{1}, {2}};
    const std::vector<std::string> words{"holocough", "state"};
    auto v = align_to_words(e, words);
    CHECK_EQ(v, (std::vector<Vector>{{1}, {2}}));
}

TEST_CASE("AlignToWords.MismatchThrows") {
    SequenceEmbedding e;
    e.tokens = {"deep", "sta", "##te", "x"};
    e.last_layer = {{1}, {2}, {3}, {4}};
    const std::vector<std::string> words{"deep", "state"};
    CHECK_THROWS_AS(align_to_words(e, words), TransportError);
}
