#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "egan/egan.h"

namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("egan_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  egan_string_free(s);
  return out;
}

// Small labelled corpus and a briefly trained model shared by the cases.
struct Pipeline {
  egan_corpus* corpus = nullptr;
  egan_model* model = nullptr;
  egan_basis* basis = nullptr;

  Pipeline() {
    egan_synth_config sc;
    egan_synth_config_default(&sc);
    sc.speakers = 4;
    sc.utterances_per_speaker = 30;
    sc.seed = 2;
    REQUIRE(egan_corpus_synthesize(&sc, &corpus) == EGAN_OK);
    egan_train_config tc;
    egan_train_config_default(&tc);
    tc.latent_dim = 8;
    tc.hidden = 32;
    tc.blocks = 1;
    tc.batch_size = 16;
    tc.steps = 10;
    tc.log_interval = 5;
    REQUIRE(egan_train(corpus, &tc, nullptr, nullptr, &model) == EGAN_OK);
    egan_directions_config dc;
    egan_directions_config_default(&dc);
    dc.samples = 500;
    dc.directions = 4;
    REQUIRE(egan_basis_fit(model, &dc, &basis) == EGAN_OK);
  }
  ~Pipeline() {
    egan_basis_free(basis);
    egan_model_free(model);
    egan_corpus_free(corpus);
  }
};

}  // namespace

TEST_SUITE("capi.basics") {
  TEST_CASE("status names and version") {
    CHECK(std::string(egan_status_name(EGAN_OK)) == "ok");
    CHECK(std::string(egan_status_name(EGAN_ERR_FORMAT)) == "format error");
    CHECK(std::string(egan_status_name(static_cast<egan_status>(42))) == "unknown status");
    CHECK(std::strlen(egan_version()) > 0);
  }

  TEST_CASE("null arguments are contract errors with a message; success clears it") {
    egan_corpus* c = nullptr;
    CHECK(egan_corpus_load(nullptr, &c) == EGAN_ERR_CONTRACT);
    CHECK(std::strlen(egan_last_error()) > 0);
    CHECK(c == nullptr);
    float z[4];
    CHECK(egan_sample_latent(1, 0, 4, z) == EGAN_OK);
    CHECK(std::strlen(egan_last_error()) == 0);
  }

  TEST_CASE("missing and malformed files map to io and format") {
    const auto dir = temp_dir("files");
    egan_corpus* c = nullptr;
    CHECK(egan_corpus_load((dir / "none").c_str(), &c) == EGAN_ERR_IO);
    const char junk[] = "EMBC garbage";
    REQUIRE(egan_write_file_atomic((dir / "bad").c_str(), junk, sizeof junk) == EGAN_OK);
    CHECK(egan_corpus_load((dir / "bad").c_str(), &c) == EGAN_ERR_FORMAT);
    egan_model* m = nullptr;
    CHECK(egan_model_load((dir / "bad").c_str(), &m) == EGAN_ERR_FORMAT);
    egan_basis* b = nullptr;
    CHECK(egan_basis_load((dir / "bad").c_str(), &b) == EGAN_ERR_FORMAT);
  }

  TEST_CASE("file hash matches a known digest") {
    const auto dir = temp_dir("hash");
    REQUIRE(egan_write_file_atomic((dir / "abc").c_str(), "abc", 3) == EGAN_OK);
    char hex[EGAN_HEX_DIGEST_LEN];
    REQUIRE(egan_file_sha256((dir / "abc").c_str(), hex) == EGAN_OK);
    CHECK(std::string(hex) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  }

  TEST_CASE("latents are deterministic per (seed, index)") {
    float a[8], b[8], c[8];
    egan_sample_latent(5, 3, 8, a);
    egan_sample_latent(5, 3, 8, b);
    egan_sample_latent(5, 4, 8, c);
    CHECK(std::memcmp(a, b, sizeof a) == 0);
    CHECK(std::memcmp(a, c, sizeof a) != 0);
    CHECK(egan_sample_latent(5, 3, 0, a) == EGAN_ERR_CONTRACT);
  }

  TEST_CASE("twins loss through the C boundary") {
    // Columns are orthogonal +-1 patterns: standardized and decorrelated.
    const float a[8] = {1, 1, -1, 1, 1, -1, -1, -1};
    double loss = -1.0;
    float ga[8];
    REQUIRE(egan_twins_loss(a, a, 4, 2, 5e-3, &loss, ga, nullptr) == EGAN_OK);
    CHECK(std::abs(loss) < 1e-6);
    const float flat[8] = {1, 1, 1, 1, 1, 1, 1, 1};
    CHECK(egan_twins_loss(flat, flat, 4, 2, 5e-3, &loss, nullptr, nullptr) == EGAN_ERR_DEGENERATE);
  }

  TEST_CASE("registry round trip") {
    egan_registry* r = nullptr;
    REQUIRE(egan_registry_new(3, &r) == EGAN_OK);
    CHECK(egan_registry_register(r, 1, "brightness", "manual") == EGAN_OK);
    CHECK(egan_registry_register(r, 3, "x", "y") == EGAN_ERR_CONTRACT);
    const auto dir = temp_dir("registry");
    REQUIRE(egan_registry_save(r, (dir / "r.tsv").c_str()) == EGAN_OK);
    egan_registry* back = nullptr;
    REQUIRE(egan_registry_load((dir / "r.tsv").c_str(), 3, &back) == EGAN_OK);
    char *label = nullptr, *prov = nullptr;
    REQUIRE(egan_registry_lookup(back, 1, &label, &prov) == EGAN_OK);
    CHECK(take(label) == "brightness");
    CHECK(take(prov) == "manual");
    REQUIRE(egan_registry_lookup(back, 0, &label, &prov) == EGAN_OK);
    CHECK(label == nullptr);
    egan_registry_free(back);
    egan_registry_free(r);
  }
}

TEST_SUITE("capi.pipeline") {
  TEST_CASE("training is reproducible and checkpoints round trip") {
    Pipeline p;
    const auto dir = temp_dir("model");
    REQUIRE(egan_model_save(p.model, (dir / "m.egan").c_str()) == EGAN_OK);
    egan_model* back = nullptr;
    REQUIRE(egan_model_load((dir / "m.egan").c_str(), &back) == EGAN_OK);
    char f1[EGAN_HEX_DIGEST_LEN], f2[EGAN_HEX_DIGEST_LEN], h1[EGAN_HEX_DIGEST_LEN], h2[EGAN_HEX_DIGEST_LEN];
    egan_model_fingerprint(p.model, f1);
    egan_model_fingerprint(back, f2);
    CHECK(std::string(f1) == f2);
    egan_model_corpus_hash(back, h1);
    egan_corpus_hash(p.corpus, h2);
    CHECK(std::string(h1) == h2);
    egan_train_config tc;
    egan_model_train_config(back, &tc);
    CHECK(tc.steps == 10);
    CHECK(egan_model_latent_dim(back) == 8);

    Pipeline q;
    egan_model_fingerprint(q.model, f2);
    CHECK(std::string(f1) == f2);
    egan_model_free(back);
  }

  TEST_CASE("metrics callback fires per interval") {
    Pipeline p;
    egan_train_config tc;
    egan_model_train_config(p.model, &tc);
    std::vector<egan_metrics> got;
    egan_model* m = nullptr;
    auto fn = [](const egan_metrics* x, void* user) { static_cast<std::vector<egan_metrics>*>(user)->push_back(*x); };
    REQUIRE(egan_train(p.corpus, &tc, fn, &got, &m) == EGAN_OK);
    REQUIRE(got.size() == 2);
    CHECK(got[0].step == 5);
    CHECK(got[1].step == 10);
    egan_model_free(m);
  }

  TEST_CASE("divergence is reported with the step") {
    Pipeline p;
    egan_train_config tc;
    egan_model_train_config(p.model, &tc);
    tc.lr_generator = tc.lr_critic = 1e30;
    tc.steps = 50;
    egan_model* m = nullptr;
    CHECK(egan_train(p.corpus, &tc, nullptr, nullptr, &m) == EGAN_ERR_DIVERGENCE);
    CHECK(std::string(egan_last_error()).find("step") != std::string::npos);
    CHECK(m == nullptr);
  }

  TEST_CASE("zero offsets reproduce plain generation") {
    Pipeline p;
    float z[8], lat[8], e0[64], e1[64];
    egan_sample_latent(7, 0, 8, z);
    const std::vector<float> zero(egan_basis_directions(p.basis), 0.0f);
    REQUIRE(egan_edit(p.model, p.basis, z, zero.data(), lat, e0) == EGAN_OK);
    REQUIRE(egan_generate(p.model, z, 1, e1) == EGAN_OK);
    CHECK(std::memcmp(lat, z, sizeof z) == 0);
    CHECK(std::memcmp(e0, e1, sizeof e0) == 0);
  }

  TEST_CASE("variances descend and the basis round trips") {
    Pipeline p;
    std::vector<double> v(egan_basis_directions(p.basis));
    REQUIRE(egan_basis_variances(p.basis, v.data()) == EGAN_OK);
    for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k - 1] >= v[k]);
    const auto dir = temp_dir("basis");
    REQUIRE(egan_basis_save(p.basis, (dir / "b.edir").c_str()) == EGAN_OK);
    egan_basis* b = nullptr;
    REQUIRE(egan_basis_load((dir / "b.edir").c_str(), &b) == EGAN_OK);
    CHECK(egan_basis_latent_dim(b) == 8);
    egan_basis_free(b);
  }

  TEST_CASE("sweeps, probes and audit") {
    Pipeline p;
    egan_probe_config pc;
    egan_probe_config_default(&pc);
    egan_probe *bin = nullptr, *sca = nullptr;
    REQUIRE(egan_probe_fit(p.corpus, "planted_binary", &pc, &bin) == EGAN_OK);
    REQUIRE(egan_probe_fit(p.corpus, "planted_scalar", &pc, &sca) == EGAN_OK);
    CHECK(egan_probe_get_kind(bin) == EGAN_PROBE_BINARY);
    CHECK(egan_probe_get_kind(sca) == EGAN_PROBE_SCALAR);
    CHECK(egan_probe_heldout_accuracy(bin) > 0.9);

    egan_sweep_config sw;
    egan_sweep_config_default(&sw);
    CHECK(sw.n_seeds == 300);
    CHECK(sw.range_lo == -50.0);
    CHECK(sw.step == 5.0);
    sw.n_seeds = 10;
    std::vector<double> eff(egan_basis_directions(p.basis));
    REQUIRE(egan_direction_effects(p.model, p.basis, bin, &sw, eff.data()) == EGAN_OK);
    for (double e : eff) CHECK(e >= 0.0);

    egan_flip_report* fr = nullptr;
    REQUIRE(egan_flip_sweep(p.model, p.basis, 0, bin, &sw, &fr) == EGAN_OK);
    egan_flip_summary fs;
    egan_flip_report_summary(fr, &fs);
    CHECK(fs.seeds == 10);
    CHECK(fs.flipped_once + fs.multi_flip == fs.flipped);
    char* csv = nullptr;
    REQUIRE(egan_flip_report_render(fr, EGAN_REPORT_RECORDS_CSV, &csv) == EGAN_OK);
    CHECK(take(csv).rfind("seed_index,", 0) == 0);
    egan_flip_report_free(fr);
    CHECK(egan_flip_sweep(p.model, p.basis, 0, sca, &sw, &fr) == EGAN_ERR_CONTRACT);
    CHECK(egan_flip_sweep(p.model, p.basis, 99, bin, &sw, &fr) == EGAN_ERR_CONTRACT);

    egan_range_report* rr = nullptr;
    REQUIRE(egan_range_sweep(p.model, p.basis, 1, sca, &sw, &rr) == EGAN_OK);
    egan_range_summary rs;
    egan_range_report_summary(rr, &rs);
    CHECK(rs.seeds == 10);
    CHECK((rs.mean_range >= 0.0 && rs.mean_range <= 1.0));
    char* svg = nullptr;
    REQUIRE(egan_range_report_render(rr, EGAN_REPORT_HISTOGRAM_SVG, &svg) == EGAN_OK);
    CHECK(take(svg).rfind("<svg", 0) == 0);
    egan_range_report_free(rr);

    egan_audit_config ac;
    egan_audit_config_default(&ac);
    CHECK(ac.n_generated == 1000);
    ac.n_generated = 20;
    egan_audit_report* ar = nullptr;
    REQUIRE(egan_privacy_audit(p.model, p.corpus, &ac, &ar) == EGAN_OK);
    egan_audit_summary as;
    egan_audit_report_summary(ar, &as);
    CHECK(as.generated == 20);
    egan_calibration cal;
    REQUIRE(egan_calibrate_threshold(p.corpus, &cal) == EGAN_OK);
    CHECK(as.threshold == cal.threshold);
    egan_audit_report_free(ar);

    float row[64];
    REQUIRE(egan_corpus_row(p.corpus, 3, row) == EGAN_OK);
    ac.use_fixed_threshold = 1;
    ac.threshold = 2.0;
    REQUIRE(egan_audit_embeddings(row, 1, p.corpus, &ac, &ar) == EGAN_OK);
    egan_audit_report_summary(ar, &as);
    CHECK(as.duplicates == 1);
    CHECK(as.threshold == 2.0);
    egan_audit_report_free(ar);

    egan_probe_free(bin);
    egan_probe_free(sca);
  }
}
