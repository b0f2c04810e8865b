#include <doctest.h>

#include <chrono>
#include <functional>
#include <thread>

#include "ars/error.hpp"
#include "ars/process_provider.hpp"

using namespace ars;
using namespace std::chrono_literals;

namespace {

std::string fake(const std::string& args) { return std::string(FAKE_PROVIDER_BIN) + " " + args; }

void expect_provider_error(const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected provider error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::provider);
  }
}

}  // namespace

TEST_SUITE("process_provider") {
  TEST_CASE("round trip with a well-behaved child") {
    ProcessProvider p(fake("ok 4"));
    CHECK(p.dim() == 4);
    auto s = p.sentiment(*tokenize("abc"));
    CHECK(s.positive == 0.5);
    CHECK(s.negative == doctest::Approx(0.3));
    auto e = p.embed("abcde");
    REQUIRE(e.dim() == 4);
    CHECK(e.values[0] == 1.0);
    CHECK(e.values[3] == 5.0);
    CHECK(p.describe() == "process:" + fake("ok 4"));
  }

  TEST_CASE("handshake must announce protocol 1") {
    expect_provider_error([] { ProcessProvider p(fake("badproto")); });
  }

  TEST_CASE("command that does not exist") {
    expect_provider_error([] { ProcessProvider p("/nonexistent/provider-binary", {1, 2000ms}); });
  }

  TEST_CASE("garbage reply") {
    ProcessProvider p(fake("garbage"));
    expect_provider_error([&] { p.embed("x"); });
  }

  TEST_CASE("error reply") {
    ProcessProvider p(fake("error"));
    expect_provider_error([&] { p.sentiment(*tokenize("x")); });
  }

  TEST_CASE("dimension disagreement") {
    ProcessProvider p(fake("wrongdim"));
    expect_provider_error([&] { p.embed("x"); });
  }

  TEST_CASE("timeout retires the worker") {
    const auto start = std::chrono::steady_clock::now();
    {
      ProcessProvider p(fake("sleep"), {1, 200ms});
      expect_provider_error([&] { p.embed("x"); });
      expect_provider_error([&] { p.embed("y"); });
    }
    CHECK(std::chrono::steady_clock::now() - start < 5s);
  }

  TEST_CASE("child exit") {
    ProcessProvider p(fake("die"));
    expect_provider_error([&] { p.embed("x"); });
  }

  TEST_CASE("worker pool serves concurrent callers") {
    ProcessProvider p(fake("ok 3"), {3, 5000ms});
    std::vector<std::thread> threads;
    std::vector<int> ok(6, 0);
    for (int t = 0; t < 6; ++t) {
      threads.emplace_back([&, t] {
        for (int k = 0; k < 20; ++k) {
          std::string text(static_cast<std::size_t>(t * 20 + k + 1), 'a');
          auto e = p.embed(text);
          if (e.values[2] == static_cast<double>(text.size())) ++ok[static_cast<std::size_t>(t)];
        }
      });
    }
    for (auto& th : threads) th.join();
    for (int v : ok) CHECK(v == 20);
  }

  TEST_CASE("factory builds process backends") {
    auto s = make_sentiment_provider("process:" + fake("ok"));
    CHECK(s->sentiment(*tokenize("hello")).negative == doctest::Approx(0.5));
    auto e = make_embedding_provider("process:" + fake("ok 5"));
    CHECK(e->embed("hi").dim() == 5);
  }
}
