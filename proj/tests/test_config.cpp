#include <dwlab/config.hpp>
#include <dwlab/io.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

using namespace dwlab;

namespace {

RunConfig full_config() {
    RunConfig c;
    c.command = "sweep";
    c.seed = 7;
    c.max_n = 321;
    c.tol = 1e-7;
    c.window = 20;
    c.grid = 9;
    c.nonconst_threshold = 0.01;
    c.csv_stride = 4;
    c.out = "somewhere";
    c.map = parse_map("mobius(3,1,1,3)");
    c.scenario = "thm4";
    c.trials = 12;
    SequenceConfig s;
    s.side = Side::right;
    s.schedule = schedule::Perturbed{parse_map("affine(e^{i/3},0)"), schedule::Perturbed::Kind::blaschke, 0.3,
                                     WeightLaw::power(2.0, 1.0, true)};
    s.normalization = Normalization::Kind::conjugate_right;
    s.normalization_base = parse_map("affine(e^{i/3},0)");
    s.offset = 3;
    c.sequence = s;
    c.points = {cplx(0.1, -0.2), cplx(0.0)};
    c.region_center = cplx(0.2, 0.1);
    c.region_radius = 1.5;
    c.sweep = SweepConfig{"amplitude", {0.0, 0.1, 0.2}};
    return c;
}

}  // namespace

TEST(Config, JsonRoundTripIsExact) {
    const RunConfig c = full_config();
    const RunConfig back = config_from_string(to_json(c).dump());
    EXPECT_EQ(back, c);
}

TEST(Config, EveryScheduleFamilyRoundTrips) {
    const std::vector<ScheduleSpec> specs{
        schedule::Constant{parse_map("affine(0.5,0.25)")},
        schedule::List{{parse_map("hpexp(1i,2*pi)")}, parse_map("hmobius(1,1,0,1)")},
        schedule::Perturbed{parse_map("affine(0.5,0)"), schedule::Perturbed::Kind::additive, 1.0, WeightLaw::geometric(0.3)},
        schedule::RandomAffine{0.5, cplx(0.1, 0.0), 0.02, 99},
        schedule::OscillatingBlocks{0.2},
    };
    for (const auto& s : specs) EXPECT_EQ(schedule_from_json(schedule_to_json(s), 99), s);
}

TEST(Config, DefaultsFromEmptyDocument) {
    const RunConfig c = config_from_string("{}");
    EXPECT_EQ(c, RunConfig{});
    EXPECT_EQ(c.seed, 42u);
}

TEST(Config, MalformedInputIsAParseError) {
    EXPECT_THROW(config_from_string("{not json"), ParseError);
    EXPECT_THROW(config_from_string(R"json({"max_n": "lots"})json"), ParseError);
    EXPECT_THROW(config_from_string(R"json({"sequence": {"schedule": {"family": "mystery"}}})json"), ParseError);
    EXPECT_THROW(config_from_string(R"json({"sequence": {"schedule": {"family": "constant", "map": "affine(2,0)"}}})json"),
                 ParseError);
    EXPECT_THROW(config_from_string(R"json({"sequence": {"side": "middle", "schedule": {"family": "constant", "map": "identity"}}})json"),
                 ParseError);
}

TEST(Config, OutOfRangeKnobsAreRejected) {
    EXPECT_THROW(config_from_string(R"json({"max_n": 0})json"), std::invalid_argument);
    EXPECT_THROW(config_from_string(R"json({"tol": -1})json"), std::invalid_argument);
    EXPECT_THROW(config_from_string(R"json({"command": "dance"})json"), std::invalid_argument);
    EXPECT_THROW(config_from_string(R"json({"grid": 1})json"), std::invalid_argument);
}

TEST(Config, RandomScheduleSeedFollowsRunSeed) {
    const RunConfig c = config_from_string(
        R"json({"seed": 5, "sequence": {"side": "right", "schedule": {"family": "random_affine", "slope": "0.5"}}})json");
    const auto spec = make_sequence_spec(c);
    EXPECT_EQ(spec.schedule.at(3), Schedule(schedule::RandomAffine{0.5, 0.0, 0.05, 5}).at(3));
}

TEST(Config, ShippedConfigsLoad) {
    std::size_t count = 0;
    for (const auto& e : std::filesystem::directory_iterator(DWLAB_CONFIG_DIR)) {
        if (e.path().extension() != ".json") continue;
        ++count;
        EXPECT_NO_THROW(load_config(e.path().string())) << e.path();
    }
    EXPECT_GE(count, 5u);
}

TEST(TrajectoryCsv, WriteThenReadRecoversValues) {
    Trajectories t;
    t.inputs = {cplx(0.1, 0.2), cplx(-0.3, 0.0)};
    for (int n = 0; n <= 10; ++n) t.values.push_back({t.inputs[0] * std::pow(0.5, n), t.inputs[1] * std::pow(0.9, n)});
    t.absorbed = {false, false};
    const json header = {{"model", "disc"}, {"note", "test"}};
    std::stringstream ss;
    write_trajectory_csv(ss, t, header, 3);
    const auto back = read_trajectory_csv(ss);
    EXPECT_EQ(back.header, header);
    // Rows at n = 0, 3, 6, 9 and the final step 10.
    ASSERT_EQ(back.n.size(), 10u);
    EXPECT_EQ(back.n.back(), 10u);
    for (std::size_t k = 0; k < back.n.size(); ++k) EXPECT_EQ(back.value[k], t.values[back.n[k]][back.point_index[k]]);
}

TEST(TrajectoryCsv, RejectsUnexpectedColumns) {
    std::stringstream ss("# {}\nx,y\n");
    EXPECT_THROW(read_trajectory_csv(ss), ParseError);
}
