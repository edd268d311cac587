#include "scud/pool.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace scud {

std::string kind_name(EntryKind kind) {
    return kind == EntryKind::Whole ? "whole" : "fragment";
}

EntryKind kind_from_name(const std::string& name) {
    if (name == "whole") return EntryKind::Whole;
    if (name == "fragment") return EntryKind::Fragment;
    throw DataError("unknown entry kind: " + name);
}

PoolEntry make_whole(const std::string& id, const std::string& utterance, const Node& program,
                     const OperatorVocabulary& vocab) {
    PoolEntry e;
    e.id = id;
    e.origin_id = id;
    e.utterance = utterance;
    e.program = program;
    e.kind = EntryKind::Whole;
    e.anon_template = anon_template(program, vocab);
    e.depth = depth(program);
    return e;
}

PoolEntry make_fragment(const PoolEntry& origin, const NodePath& path,
                        const std::string& utterance, const Node& program,
                        const OperatorVocabulary& vocab) {
    PoolEntry e;
    e.id = origin.id + "#" + path_to_string(path);
    e.origin_id = origin.id;
    e.utterance = utterance;
    e.program = program;
    e.path = path;
    e.kind = EntryKind::Fragment;
    e.anon_template = anon_template(program, vocab);
    e.depth = depth(program);
    return e;
}

const PoolEntry* Pool::find(const std::string& id) const {
    for (const PoolEntry& e : entries)
        if (e.id == id) return &e;
    return nullptr;
}

std::size_t Pool::whole_count() const {
    std::size_t n = 0;
    for (const PoolEntry& e : entries) n += e.kind == EntryKind::Whole;
    return n;
}

std::size_t Pool::fragment_count() const {
    return entries.size() - whole_count();
}

namespace {

using ordered_json = nlohmann::ordered_json;

const char* kKeys[] = {"id", "origin_id", "utterance", "program", "path", "kind",
                       "anon_template", "depth"};

PoolEntry entry_from_json(const ordered_json& doc, std::size_t line_no,
                          const OperatorVocabulary& vocab) {
    auto fail = [&](const std::string& msg) -> void {
        throw SchemaError("line " + std::to_string(line_no) + ": " + msg);
    };
    if (!doc.is_object()) fail("expected a JSON object");
    for (const char* key : kKeys)
        if (!doc.contains(key)) fail(std::string("missing key \"") + key + "\"");

    PoolEntry e;
    if (!doc["id"].is_string() || !doc["origin_id"].is_string() || !doc["utterance"].is_string() ||
        !doc["program"].is_string() || !doc["kind"].is_string() ||
        !doc["anon_template"].is_string() || !doc["depth"].is_number_integer() ||
        !doc["path"].is_array())
        fail("ill-typed field");
    e.id = doc["id"].get<std::string>();
    e.origin_id = doc["origin_id"].get<std::string>();
    e.utterance = doc["utterance"].get<std::string>();
    try {
        e.program = parse_program(doc["program"].get<std::string>());
    } catch (const ParseError& pe) {
        fail(std::string("unparseable program: ") + pe.what());
    }
    for (const auto& idx : doc["path"]) {
        if (!idx.is_number_integer()) fail("path must contain integers");
        e.path.push_back(idx.get<int>());
    }
    try {
        e.kind = kind_from_name(doc["kind"].get<std::string>());
    } catch (const DataError& de) {
        fail(de.what());
    }

    bool whole = e.kind == EntryKind::Whole;
    if (whole != e.path.empty() || whole != (e.origin_id == e.id))
        fail("kind/path/origin_id disagree for entry \"" + e.id + "\"");

    e.anon_template = doc["anon_template"].get<std::string>();
    e.depth = doc["depth"].get<int>();
    std::string expect_template = anon_template(e.program, vocab);
    int expect_depth = depth(e.program);
    if (e.anon_template != expect_template)
        throw CacheMismatch("entry " + e.id + ": stored anon_template \"" + e.anon_template +
                            "\" != recomputed \"" + expect_template + "\"");
    if (e.depth != expect_depth)
        throw CacheMismatch("entry " + e.id + ": stored depth " + std::to_string(e.depth) +
                            " != recomputed " + std::to_string(expect_depth));
    return e;
}

ordered_json entry_to_json(const PoolEntry& e) {
    ordered_json doc;
    doc["id"] = e.id;
    doc["origin_id"] = e.origin_id;
    doc["utterance"] = e.utterance;
    doc["program"] = print_program(e.program);
    doc["path"] = e.path;
    doc["kind"] = kind_name(e.kind);
    doc["anon_template"] = e.anon_template;
    doc["depth"] = e.depth;
    return doc;
}

}  // namespace

Pool load_pool(const std::string& file, const OperatorVocabulary& vocab) {
    std::ifstream in(file);
    if (!in) throw IoError("cannot open pool file: " + file);
    Pool pool;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ordered_json doc;
        try {
            doc = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError("line " + std::to_string(line_no) + ": " + e.what());
        }
        PoolEntry entry = entry_from_json(doc, line_no, vocab);
        if (!ids.insert(entry.id).second)
            throw DuplicateId("duplicate pool id: " + entry.id);
        pool.entries.push_back(std::move(entry));
    }
    return pool;
}

void save_pool(const Pool& pool, const std::string& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write pool file: " + file);
    for (const PoolEntry& e : pool.entries) out << entry_to_json(e).dump() << '\n';
}

Pool augment(const Pool& pool, const std::vector<PoolEntry>& fragments) {
    Pool out = pool;
    std::set<std::string> ids;
    std::set<std::string> whole_ids;
    for (const PoolEntry& e : pool.entries) {
        ids.insert(e.id);
        if (e.kind == EntryKind::Whole) whole_ids.insert(e.id);
    }
    for (const PoolEntry& f : fragments) {
        if (!whole_ids.count(f.origin_id))
            throw DanglingOrigin("fragment " + f.id + ": origin \"" + f.origin_id +
                                 "\" is not a whole in the pool");
        if (!ids.insert(f.id).second) throw DuplicateId("duplicate pool id: " + f.id);
        out.entries.push_back(f);
    }
    return out;
}

Pool filter_by_depth(const Pool& pool, int min_depth) {
    std::set<std::string> kept_wholes;
    Pool out;
    for (const PoolEntry& e : pool.entries)
        if (e.kind == EntryKind::Whole && e.depth >= min_depth) kept_wholes.insert(e.id);
    for (const PoolEntry& e : pool.entries) {
        bool keep = e.kind == EntryKind::Whole ? kept_wholes.count(e.id) != 0
                                               : kept_wholes.count(e.origin_id) != 0;
        if (keep) out.entries.push_back(e);
    }
    return out;
}

PoolStats pool_stats(const Pool& pool) {
    PoolStats stats;
    for (const PoolEntry& e : pool.entries) {
        if (e.kind == EntryKind::Whole) {
            ++stats.wholes;
            ++stats.whole_depth_histogram[e.depth];
        } else {
            ++stats.fragments;
        }
    }
    return stats;
}

}  // namespace scud
