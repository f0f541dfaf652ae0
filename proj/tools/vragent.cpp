#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "CLI11.hpp"
#include "vragent/config.hpp"
#include "vragent/corpus.hpp"
#include "vragent/crop.hpp"
#include "vragent/embedder.hpp"
#include "vragent/error.hpp"
#include "vragent/index.hpp"
#include "vragent/mask.hpp"
#include "vragent/runner.hpp"
#include "vragent/sft.hpp"
#include "vragent/synthetic.hpp"

namespace fs = std::filesystem;
using namespace vragent;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitPartial = 1;
constexpr int kExitConfig = 2;

RetrievalIndex build_index_from_manifest(const CorpusManifest& manifest,
                                         const TextEmbedder& embedder) {
    if (manifest.empty()) raise(Errc::ConfigError, "manifest is empty");
    std::vector<PageEmbedding> pages;
    pages.reserve(manifest.entries().size());
    for (const auto& entry : manifest.entries()) {
        if (!fs::exists(entry.image_path)) {
            raise(Errc::MissingImage, entry.image_path);
        }
        PageEmbedding p;
        p.page_id = entry.page_id;
        p.vectors = embedder.embed(entry.text.empty() ? entry.page_id : entry.text);
        pages.push_back(std::move(p));
    }
    return RetrievalIndex::build(embedder.dim(), std::move(pages));
}

int cmd_index(const std::string& manifest_path, const std::string& out_path, size_t dim,
              const std::string& embedder_kind) {
    auto manifest = CorpusManifest::load_jsonl(manifest_path);
    auto embedder = make_embedder(embedder_kind, dim);
    auto index = build_index_from_manifest(manifest, *embedder);
    index.save(out_path);
    std::cout << "indexed " << index.page_count() << " pages (dim " << index.dim() << ") -> "
              << out_path << "\n";
    return kExitOk;
}

void check_eval_against_corpus(const std::vector<Query>& samples, const CorpusManifest& corpus) {
    for (const auto& q : samples) {
        for (const auto& p : q.reference_pages) {
            if (!corpus.find(p)) {
                raise(Errc::ConfigError,
                      "eval sample '" + q.id + "' references unknown page '" + p + "'");
            }
        }
    }
}

int cmd_run(RunConfig cfg) {
    if (cfg.index_path.empty() || cfg.corpus_path.empty() || cfg.eval_path.empty()) {
        raise(Errc::ConfigError, "run requires index, corpus and eval paths");
    }
    auto corpus = CorpusManifest::load_jsonl(cfg.corpus_path);
    auto index = RetrievalIndex::load(cfg.index_path);
    auto samples = load_eval_set(cfg.eval_path);
    if (samples.empty()) raise(Errc::ConfigError, "eval set is empty");
    check_eval_against_corpus(samples, corpus);
    auto embedder = make_embedder(cfg.embedder, cfg.embed_dim);
    if (embedder->dim() != index.dim()) {
        raise(Errc::ConfigError, "embedder dim does not match index dim");
    }
    auto templates = resolve_templates(cfg);
    templates.validate();
    auto judge = make_judge(cfg.judge);
    auto policy_factory = make_policy_factory(cfg.policy, &corpus, cfg.tools);

    Environment env;
    env.index = &index;
    env.embedder = embedder.get();
    env.corpus = &corpus;
    env.templates = &templates;
    env.tools = cfg.tools;

    RunnerOptions opts;
    opts.loop = cfg.loop;
    opts.tools = cfg.tools;
    opts.parallelism = cfg.parallelism;
    opts.seed = cfg.seed;

    auto results = run_eval_set(samples, env, policy_factory, judge.get(), opts);

    fs::create_directories(cfg.output_dir);
    std::vector<nlohmann::json> traj_rows;
    std::vector<nlohmann::json> event_rows;
    std::vector<nlohmann::json> error_rows;
    std::vector<Trajectory> trajectories;
    std::vector<std::optional<int>> judged;
    int failed = 0;
    for (const auto& r : results) {
        if (r.error) {
            ++failed;
            error_rows.push_back({{"id", r.query.id}, {"error", *r.error}});
            std::cerr << "sample " << r.query.id << " failed: " << *r.error << "\n";
            continue;
        }
        if (r.loop.failure) {
            ++failed;
            error_rows.push_back({{"id", r.query.id}, {"error", *r.loop.failure}});
            std::cerr << "sample " << r.query.id << " backend failure: " << *r.loop.failure
                      << "\n";
        }
        traj_rows.push_back(to_json(r.loop.trajectory));
        trajectories.push_back(r.loop.trajectory);
        judged.push_back(r.judged_correct);
        if (cfg.trace) {
            for (const auto& ev : r.loop.events) {
                event_rows.push_back({{"query_id", r.query.id},
                                      {"turn", ev.turn},
                                      {"kind", ev.kind},
                                      {"detail", ev.detail},
                                      {"timestamp_ms", ev.timestamp_ms}});
            }
        }
    }
    write_jsonl((fs::path(cfg.output_dir) / "trajectories.jsonl").string(), traj_rows);
    if (cfg.trace) {
        write_jsonl((fs::path(cfg.output_dir) / "events.jsonl").string(), event_rows);
    }
    if (!error_rows.empty()) {
        write_jsonl((fs::path(cfg.output_dir) / "errors.jsonl").string(), error_rows);
    }

    RunSummary summary = summarize(trajectories, judged, {});
    summary.failed = failed;
    nlohmann::json sj = to_json(summary);
    sj.erase("mean_total");  // rewards are the score verb's business
    std::ofstream out((fs::path(cfg.output_dir) / "metrics.json").string(), std::ios::binary);
    out << sj.dump(2) << "\n";
    std::cout << sj.dump(2) << "\n";
    return failed == 0 ? kExitOk : kExitPartial;
}

int cmd_score(const std::string& traj_path, const std::string& eval_path,
              const std::string& out_dir, const nlohmann::json& judge_spec) {
    auto judge = make_judge(judge_spec.is_null() ? nlohmann::json({{"kind", "scripted"}})
                                                 : judge_spec);
    auto samples = load_eval_set(eval_path);
    std::map<std::string, const Query*> by_id;
    for (const auto& q : samples) by_id[q.id] = &q;

    std::vector<Trajectory> trajectories;
    for (const auto& row : read_jsonl(traj_path)) {
        trajectories.push_back(trajectory_from_json(row));
    }

    fs::create_directories(out_dir);
    std::vector<nlohmann::json> reward_rows;
    std::vector<std::optional<RewardBreakdown>> rewards;
    std::vector<std::optional<int>> judged;
    int failed = 0;
    for (auto& traj : trajectories) {
        auto it = by_id.find(traj.query.id);
        if (it == by_id.end()) {
            raise(Errc::ConfigError, "trajectory '" + traj.query.id + "' not in eval set");
        }
        // the eval set is authoritative for ground truth
        traj.query.reference_pages = it->second->reference_pages;
        traj.query.reference_answer = it->second->reference_answer;

        nlohmann::json row;
        row["id"] = traj.query.id;
        if (traj.query.reference_pages.empty()) {
            ++failed;
            row["skipped"] = "no reference pages";
            rewards.emplace_back();
            judged.emplace_back();
        } else {
            RewardBreakdown b = score_trajectory(traj, *judge);
            row.update(to_json(b));
            rewards.emplace_back(b);
            if (traj.query.reference_answer && traj.final_answer) {
                judged.emplace_back(judge->correctness(traj.query.text,
                                                       *traj.query.reference_answer,
                                                       *traj.final_answer));
            } else {
                judged.emplace_back();
            }
        }
        reward_rows.push_back(std::move(row));
    }
    write_jsonl((fs::path(out_dir) / "rewards.jsonl").string(), reward_rows);

    RunSummary summary = summarize(trajectories, judged, rewards);
    summary.failed = failed;
    nlohmann::json sj = to_json(summary);
    std::ofstream out((fs::path(out_dir) / "summary.json").string(), std::ios::binary);
    out << sj.dump(2) << "\n";
    std::cout << sj.dump(2) << "\n";
    return failed == 0 ? kExitOk : kExitPartial;
}

int cmd_sft_build(const std::string& traj_path, const std::string& eval_path,
                  const std::string& corpus_path, const std::string& out_dir,
                  const std::string& reasoning_path, int max_searches, uint64_t seed) {
    auto corpus = CorpusManifest::load_jsonl(corpus_path);
    auto samples = load_eval_set(eval_path);
    std::map<std::string, const Query*> by_id;
    for (const auto& q : samples) by_id[q.id] = &q;

    std::map<std::string, std::string> reasoning;
    if (!reasoning_path.empty()) {
        for (const auto& row : read_jsonl(reasoning_path)) {
            reasoning[row.at("id").get<std::string>()] = row.at("text").get<std::string>();
        }
    }
    const std::string default_reasoning =
        "The verification page is consistent with the recorded evidence and does not "
        "contradict the answer.";

    ScriptedJudge judge;
    auto templates = PromptTemplateSet::builtin_default();
    SftFilterOptions options;
    options.max_searches = max_searches;

    fs::create_directories(out_dir);
    std::vector<nlohmann::json> accepted_rows;
    std::ofstream report((fs::path(out_dir) / "rejections.csv").string(), std::ios::binary);
    report << "id,rejections\n";

    int accepted_n = 0, rejected_n = 0;
    for (const auto& row : read_jsonl(traj_path)) {
        Trajectory traj = trajectory_from_json(row);
        auto it = by_id.find(traj.query.id);
        if (it == by_id.end()) {
            raise(Errc::ConfigError, "trajectory '" + traj.query.id + "' not in eval set");
        }
        traj.query.reference_pages = it->second->reference_pages;
        traj.query.reference_answer = it->second->reference_answer;
        const std::string reference_answer =
            traj.query.reference_answer ? *traj.query.reference_answer : std::string();

        FilterVerdict verdict =
            sft_filter(traj, traj.query.reference_pages, reference_answer, judge, options);
        if (!verdict.accepted) {
            ++rejected_n;
            report << traj.query.id << ",";
            for (size_t i = 0; i < verdict.rejections.size(); ++i) {
                if (i) report << ";";
                report << sft_rejection_name(verdict.rejections[i]);
            }
            report << "\n";
            continue;
        }

        // verification page: unseen page from the same document as a
        // reference page, sampled deterministically per query
        std::vector<const CorpusEntry*> candidates;
        std::set<std::string> doc_ids;
        for (const auto& p : traj.query.reference_pages) {
            if (const CorpusEntry* e = corpus.find(p)) doc_ids.insert(e->document_id);
        }
        for (const auto& e : corpus.entries()) {
            if (doc_ids.count(e.document_id) && !traj.has_retrieved(e.page_id)) {
                candidates.push_back(&e);
            }
        }
        if (candidates.empty()) {
            ++rejected_n;
            report << traj.query.id << ",no_unseen_page\n";
            continue;
        }
        std::mt19937_64 rng(derive_seed(seed, traj.query.id));
        const CorpusEntry* pick =
            candidates[std::uniform_int_distribution<size_t>(0, candidates.size() - 1)(rng)];

        auto rit = reasoning.find(traj.query.id);
        const std::string text = rit != reasoning.end() ? rit->second : default_reasoning;
        Trajectory augmented = sft_augment(traj, text, pick->ref(), templates);
        accepted_rows.push_back(to_json(augmented));
        ++accepted_n;
    }
    write_jsonl((fs::path(out_dir) / "sft_trajectories.jsonl").string(), accepted_rows);
    std::cout << "accepted " << accepted_n << ", rejected " << rejected_n << "\n";
    return kExitOk;
}

int cmd_mask(const std::string& in_path, const std::string& out_path) {
    std::vector<nlohmann::json> out_rows;
    for (const auto& row : read_jsonl(in_path)) {
        std::vector<TranscriptSegment> segments;
        for (const auto& s : row.at("segments")) {
            TranscriptSegment seg;
            seg.role = segment_role_from_name(s.at("role").get<std::string>());
            seg.length = s.at("len").get<int64_t>();
            segments.push_back(seg);
        }
        auto spans = rl_mask_spans(segments);
        nlohmann::json jr;
        if (row.contains("id")) jr["id"] = row.at("id");
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& sp : spans) {
            arr.push_back(
                {{"start", sp.start}, {"end", sp.end}, {"kind", mask_kind_name(sp.kind)}});
        }
        jr["spans"] = std::move(arr);
        out_rows.push_back(std::move(jr));
    }
    write_jsonl(out_path, out_rows);
    return kExitOk;
}

int cmd_simulate(const std::string& out_dir, int pages, int docs) {
    SyntheticCorpusSpec spec;
    spec.pages = pages;
    spec.docs = docs;
    auto manifest = generate_synthetic_corpus(out_dir, spec);

    // Small self-contained demo: 2 queries plus the scripts that answer them.
    std::vector<Query> samples;
    Query q1;
    q1.id = "demo_1";
    q1.text = "What marker word is printed on " + manifest.entries()[2].page_id + "?";
    q1.reference_answer = synthetic_marker(2);
    q1.reference_pages = {manifest.entries()[2].page_id};
    samples.push_back(q1);
    Query q2;
    q2.id = "demo_2";
    q2.text = "Which pages carry " + synthetic_marker(4) + " and " + synthetic_marker(5) + "?";
    q2.reference_answer = manifest.entries()[4].page_id + " and " + manifest.entries()[5].page_id;
    q2.reference_pages = {manifest.entries()[4].page_id, manifest.entries()[5].page_id};
    samples.push_back(q2);
    save_eval_set((fs::path(out_dir) / "eval.jsonl").string(), samples);

    auto think_search = [](const std::string& think, const std::string& q) {
        return "<think>" + think + "</think><search>" + q + "</search>";
    };
    nlohmann::json script;
    script["queries"]["demo_1"]["responses"] = nlohmann::json::array(
        {{{"turn", 1}, {"text", think_search("I need that page.", synthetic_marker(2))}},
         {{"turn", 2},
          {"text", "<think>The page shows the marker word; I will verify before "
                   "answering.</think><search>" +
                       synthetic_marker(2) + " " + synthetic_marker(3) + "</search>"}},
         {{"turn", 3},
          {"text",
           "<think>Nothing contradicts my notes.</think><answer>" + synthetic_marker(2) +
               "</answer>"}}});
    script["queries"]["demo_2"]["responses"] = nlohmann::json::array(
        {{{"turn", 1}, {"text", think_search("Find the first page.", synthetic_marker(4))}},
         {{"turn", 2}, {"text", think_search("Now the second page.", synthetic_marker(5))}},
         {{"turn", 3},
          {"text", "<think>Both pages found; I will verify before answering.</think><search>" +
                       synthetic_marker(4) + " extra</search>"}},
         {{"turn", 4},
          {"text", "<think>Confirmed.</think><answer>" + manifest.entries()[4].page_id +
                       " and " + manifest.entries()[5].page_id + "</answer>"}}});
    {
        std::ofstream out((fs::path(out_dir) / "policy_script.json").string(), std::ios::binary);
        out << script.dump(2) << "\n";
    }

    nlohmann::json cfg;
    cfg["index"] = "index.vidx";
    cfg["corpus"] = "manifest.jsonl";
    cfg["eval"] = "eval.jsonl";
    cfg["output_dir"] = "out";
    cfg["policy"] = {{"kind", "scripted"}, {"script", "policy_script.json"}};
    cfg["judge"] = {{"kind", "scripted"}};
    {
        std::ofstream out((fs::path(out_dir) / "config.json").string(), std::ios::binary);
        out << cfg.dump(2) << "\n";
    }

    std::cout << "synthetic corpus in " << out_dir << " (" << pages << " pages)\n"
              << "next:\n"
              << "  vragent index --manifest " << out_dir << "/manifest.jsonl --out " << out_dir
              << "/index.vidx\n"
              << "  cd " << out_dir << " && vragent run --config config.json\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"agentic visual-RAG engine"};
    app.require_subcommand(1);

    // index
    auto* sc_index = app.add_subcommand("index", "build a VIDX retrieval index from a manifest");
    std::string manifest_path, index_out, embedder_kind = "hashing";
    size_t dim = 64;
    sc_index->add_option("--manifest", manifest_path, "corpus manifest JSONL")->required();
    sc_index->add_option("--out", index_out, "output index path")->required();
    sc_index->add_option("--dim", dim, "embedding dimension");
    sc_index->add_option("--embedder", embedder_kind, "embedder kind (hashing)");

    // run
    auto* sc_run = app.add_subcommand("run", "run an eval set through the agent loop");
    std::string run_config_path;
    std::string ov_eval, ov_index, ov_corpus, ov_outdir;
    int ov_max_turns = -1, ov_window = -1, ov_parallelism = -1;
    long long ov_seed = -1;
    bool ov_trace = false;
    sc_run->add_option("--config", run_config_path, "run config JSON")->required();
    sc_run->add_option("--eval", ov_eval, "override eval set path");
    sc_run->add_option("--index", ov_index, "override index path");
    sc_run->add_option("--corpus", ov_corpus, "override corpus manifest path");
    sc_run->add_option("--output-dir", ov_outdir, "override output directory");
    sc_run->add_option("--max-turns", ov_max_turns, "override max turns");
    sc_run->add_option("--window", ov_window, "override sliding window size");
    sc_run->add_option("--seed", ov_seed, "override root seed");
    sc_run->add_option("--parallelism", ov_parallelism, "override worker count");
    sc_run->add_flag("--trace", ov_trace, "write a loop-event JSONL stream");

    // score
    auto* sc_score = app.add_subcommand("score", "compute rewards for logged trajectories");
    std::string score_traj, score_eval, score_outdir = "out", score_judge;
    sc_score->add_option("--trajectories", score_traj, "trajectories JSONL")->required();
    sc_score->add_option("--eval", score_eval, "eval set JSONL")->required();
    sc_score->add_option("--output-dir", score_outdir, "output directory");
    sc_score->add_option("--judge-config", score_judge, "judge spec JSON file (default scripted)");

    // sft-build
    auto* sc_sft = app.add_subcommand("sft-build", "filter and augment trajectories for SFT");
    std::string sft_traj, sft_eval, sft_corpus, sft_outdir = "out", sft_reasoning;
    int sft_max_searches = 10;
    long long sft_seed = 0;
    sc_sft->add_option("--trajectories", sft_traj, "trajectories JSONL")->required();
    sc_sft->add_option("--eval", sft_eval, "eval set JSONL")->required();
    sc_sft->add_option("--corpus", sft_corpus, "corpus manifest JSONL")->required();
    sc_sft->add_option("--output-dir", sft_outdir, "output directory");
    sc_sft->add_option("--reasoning", sft_reasoning,
                       "verification reasoning JSONL ({id,text} per row)");
    sc_sft->add_option("--max-searches", sft_max_searches, "search-count filter threshold");
    sc_sft->add_option("--seed", sft_seed, "verification page sampling seed");

    // mask
    auto* sc_mask = app.add_subcommand("mask", "compute RL observation-mask spans");
    std::string mask_in, mask_out;
    sc_mask->add_option("--in", mask_in, "segmented transcripts JSONL")->required();
    sc_mask->add_option("--out", mask_out, "spans JSONL")->required();

    // simulate
    auto* sc_sim = app.add_subcommand("simulate", "generate a synthetic corpus and demo run");
    std::string sim_outdir = "sim";
    int sim_pages = 20, sim_docs = 2;
    sc_sim->add_option("--output-dir", sim_outdir, "output directory");
    sc_sim->add_option("--pages", sim_pages, "number of pages");
    sc_sim->add_option("--docs", sim_docs, "number of documents");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sc_index) return cmd_index(manifest_path, index_out, dim, embedder_kind);
        if (*sc_run) {
            RunConfig cfg = RunConfig::load(run_config_path);
            // paths in the config resolve relative to the config file
            const fs::path base = fs::path(run_config_path).parent_path();
            auto resolve = [&](std::string& p) {
                if (!p.empty() && fs::path(p).is_relative()) p = (base / p).string();
            };
            resolve(cfg.index_path);
            resolve(cfg.corpus_path);
            resolve(cfg.eval_path);
            resolve(cfg.template_dir);
            resolve(cfg.output_dir);
            if (cfg.policy.is_object() && cfg.policy.contains("script")) {
                std::string s = cfg.policy["script"].get<std::string>();
                resolve(s);
                cfg.policy["script"] = s;
            }
            if (!ov_eval.empty()) cfg.eval_path = ov_eval;
            if (!ov_index.empty()) cfg.index_path = ov_index;
            if (!ov_corpus.empty()) cfg.corpus_path = ov_corpus;
            if (!ov_outdir.empty()) cfg.output_dir = ov_outdir;
            if (ov_max_turns > 0) cfg.loop.max_turns = ov_max_turns;
            if (ov_window > 0) cfg.loop.window_size = ov_window;
            if (ov_seed >= 0) cfg.seed = static_cast<uint64_t>(ov_seed);
            if (ov_parallelism > 0) cfg.parallelism = ov_parallelism;
            if (ov_trace) cfg.trace = true;
            return cmd_run(std::move(cfg));
        }
        if (*sc_score) {
            nlohmann::json judge_spec;
            if (!score_judge.empty()) {
                std::ifstream in(score_judge);
                if (!in) raise(Errc::ConfigError, "cannot open '" + score_judge + "'");
                in >> judge_spec;
                judge_spec = interpolate_env_json(judge_spec);
            }
            return cmd_score(score_traj, score_eval, score_outdir, judge_spec);
        }
        if (*sc_sft) {
            return cmd_sft_build(sft_traj, sft_eval, sft_corpus, sft_outdir, sft_reasoning,
                                 sft_max_searches, static_cast<uint64_t>(sft_seed));
        }
        if (*sc_mask) return cmd_mask(mask_in, mask_out);
        if (*sc_sim) return cmd_simulate(sim_outdir, sim_pages, sim_docs);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == Errc::ConfigError || e.code() == Errc::BadIndexFile ||
                       e.code() == Errc::MissingImage
                   ? kExitConfig
                   : kExitPartial;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
