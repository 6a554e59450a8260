use std::sync::Arc;

use num_bigint::BigUint;
use proptest::prelude::*;
use stabilab_core::algorithm::dsl::{Assign, BinOp, Expr, Rule};
use stabilab_core::algorithm::{parse_rules, render, unpack_input};
use stabilab_core::checker::{model_check_synchronous, TraceStatus, DEFAULT_CONFIG_CAP};
use stabilab_core::lowerbound::{
    behavior_cardinality, exceeds_behavior_count, extract_behavior, find_uniform_id_set, homogeneity_trap, min_guaranteed_size,
};
use stabilab_core::model::make_ring;
use stabilab_core::problems::{CustomRule, SpecVar};
use stabilab_core::scheduler::Strategy as Choice;
use stabilab_core::{
    Algorithm, Behavior, Configuration, Daemon, Exponent, IdAssignment, Instance, ProblemSpec, RuleSet, State, TransitionTable,
};

const INT_OPS: [BinOp; 4] = [BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Mod];
const CMP_OPS: [BinOp; 6] = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge];

fn int_expr(nvars: usize, with_id: bool) -> impl Strategy<Value = Expr> {
    let mut leaves = vec![
        (0u64..20).prop_map(Expr::Int).boxed(),
        (0..nvars).prop_map(Expr::Own).boxed(),
        (0..2usize, 0..nvars).prop_map(|(port, var)| Expr::Neighbor { port, var }).boxed(),
    ];
    if with_id {
        leaves.push(Just(Expr::Id).boxed());
    }
    proptest::strategy::Union::new(leaves).prop_recursive(3, 12, 2, |inner| {
        (0..INT_OPS.len(), inner.clone(), inner).prop_map(|(op, a, b)| Expr::Binary(INT_OPS[op], Box::new(a), Box::new(b)))
    })
}

fn bool_expr(nvars: usize, with_id: bool) -> impl Strategy<Value = Expr> {
    let cmp = (0..CMP_OPS.len(), int_expr(nvars, with_id), int_expr(nvars, with_id))
        .prop_map(|(op, a, b)| Expr::Binary(CMP_OPS[op], Box::new(a), Box::new(b)));
    prop_oneof![any::<bool>().prop_map(Expr::Bool), cmp].prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Not(Box::new(e))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Binary(BinOp::And, Box::new(a), Box::new(b))),
            (inner.clone(), inner).prop_map(|(a, b)| Expr::Binary(BinOp::Or, Box::new(a), Box::new(b))),
        ]
    })
}

/// Programs with one to two fields of total width at most `max_f`.
fn rule_set(max_f: u32, with_id: bool) -> impl Strategy<Value = RuleSet> {
    prop::collection::vec(1..=max_f, 1..=2)
        .prop_filter("width", move |w| w.iter().sum::<u32>() <= max_f)
        .prop_flat_map(move |widths| {
            let nvars = widths.len();
            let rule = (bool_expr(nvars, with_id), prop::collection::vec((0..nvars, int_expr(nvars, with_id)), 1..=2));
            (Just(widths), prop::collection::vec(rule, 0..=3))
        })
        .prop_map(|(widths, rules)| {
            let vars = widths.iter().enumerate().map(|(i, &w)| (["a", "b"][i].to_string(), w)).collect();
            let rules = rules
                .into_iter()
                .enumerate()
                .map(|(i, (guard, cmds))| {
                    let mut command: Vec<Assign> = Vec::new();
                    for (var, value) in cmds {
                        if !command.iter().any(|a| a.var == var) {
                            command.push(Assign { var, value });
                        }
                    }
                    Rule { label: format!("r{i}"), guard, command }
                })
                .collect();
            RuleSet::from_parts(vars, rules)
        })
}

fn behavior(max_f: u32) -> impl Strategy<Value = Behavior> {
    (1..=max_f).prop_flat_map(|f| {
        prop::collection::vec(0..(1u64 << f), 1usize << (3 * f)).prop_map(move |t| Behavior::new(f, 2, t).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn render_then_parse_is_identity(rs in rule_set(4, true)) {
        let text = render(&rs);
        prop_assert_eq!(parse_rules(&text), Ok(rs), "{}", text);
    }

    #[test]
    fn programs_without_id_ignore_the_id(rs in rule_set(3, false), id1 in 1u64..1000, id2 in 1u64..1000, x in any::<usize>()) {
        let a = Algorithm::from_rules("anon", rs, 2).unwrap();
        prop_assert!(!a.mentions_id());
        let inputs = 1usize << (3 * a.f());
        let (own, view) = unpack_input(a.f(), 2, x % inputs);
        prop_assert_eq!(a.evaluate(id1, own, &view), a.evaluate(id2, own, &view));
        prop_assert_eq!(a.is_enabled(id1, own, &view), a.is_enabled(id2, own, &view));
    }

    #[test]
    fn extracted_tables_match_evaluation(rs in rule_set(2, true), id in 1u64..10_000) {
        let a = Algorithm::from_rules("a", rs, 2).unwrap();
        let b = extract_behavior(&a, id).unwrap();
        for (x, &out) in b.table().iter().enumerate() {
            let (own, view) = unpack_input(a.f(), 2, x);
            prop_assert_eq!(out, a.evaluate(id, own, &view).unwrap());
        }
    }

    #[test]
    fn evaluation_is_repeatable(rs in rule_set(3, true), id in 1u64..100, x in any::<usize>()) {
        let a = Algorithm::from_rules("a", rs, 2).unwrap();
        let (own, view) = unpack_input(a.f(), 2, x % (1usize << (3 * a.f())));
        let first = a.evaluate(id, own, &view).unwrap();
        prop_assert!(first < 1 << a.f());
        prop_assert_eq!(first, a.evaluate(id, own, &view).unwrap());
    }

    #[test]
    fn one_synchronous_step_keeps_homogeneity(b in behavior(3), s in any::<u64>(), n in 3usize..=8) {
        let s = s & ((1 << b.f()) - 1);
        let alg = Algorithm::from_table("b", TransitionTable::anonymous(b.clone()));
        let ring = make_ring(n, false, None).unwrap();
        let ids = IdAssignment::sequential(n);
        let inst = Instance::new(&ring, &alg, &ids).unwrap();
        let start = Configuration::homogeneous(b.f(), n, s).unwrap();
        let enabled = inst.enabled_set(&start).unwrap();
        let next = inst.step(&start, &enabled).unwrap();
        prop_assert!(next.is_homogeneous());
        prop_assert!(next.state(0) == b.on_homogeneous(s) || next.state(0) == s);
    }

    #[test]
    fn traps_close_within_state_count(b in behavior(3), s in any::<u64>(), n in 3usize..=8) {
        let s = s & ((1 << b.f()) - 1);
        let t = homogeneity_trap(&b, n, s).unwrap();
        prop_assert!(t.prefix.len() + t.cycle.len() <= 1 << b.f());
        let last = *t.cycle.last().unwrap();
        prop_assert_eq!(b.on_homogeneous(last), t.cycle[0]);
        let mut x = s;
        for step in 0..(2 * t.prefix.len() + 2 * t.period() + 2) {
            prop_assert_eq!(t.state_at(step), x);
            x = b.on_homogeneous(x);
        }
    }

    #[test]
    fn log_domain_agrees_with_big_integers(f in 0u32..=2, d in 1usize..=2, p in 2u64..=9, q in 1u64..=4, n in 2u64..5_000_000) {
        prop_assume!(p > q);
        let c = Exponent::new(p, q).unwrap();
        let space = behavior_cardinality(f, d);
        let card = space.cardinality.clone().unwrap();
        let direct = BigUint::from(n).pow((p - q) as u32) > card.pow(q as u32);
        prop_assert_eq!(exceeds_behavior_count(n, c, &space.log2_cardinality).unwrap(), direct);
    }

    #[test]
    fn log_domain_agrees_near_the_boundary(f in 0u32..=2, d in 1usize..=2, p in 2u64..=12, q in 1u64..=5, delta in -3i64..=3) {
        prop_assume!(p > q);
        let c = Exponent::new(p, q).unwrap();
        let space = behavior_cardinality(f, d);
        let rhs = space.cardinality.clone().unwrap().pow(q as u32);
        let root = rhs.nth_root((p - q) as u32);
        let Some(root) = u64::try_from(&root).ok().filter(|&r| r < u64::MAX / 2) else { return Ok(()) };
        let n = (root as i64 + delta).max(0) as u64;
        let direct = BigUint::from(n).pow((p - q) as u32) > rhs;
        prop_assert_eq!(exceeds_behavior_count(n, c, &space.log2_cardinality).unwrap(), direct);
    }

    #[test]
    fn threshold_is_the_first_qualifying_size(f in 0u32..=1, p in 2u64..=6, q in 1u64..=3) {
        prop_assume!(p > q);
        let c = Exponent::new(p, q).unwrap();
        let log2 = behavior_cardinality(f, 2).log2_cardinality;
        if let Some(n) = min_guaranteed_size(f, c, 2, 1 << 20).unwrap() {
            prop_assert!(exceeds_behavior_count(n, c, &log2).unwrap());
            prop_assert!(n == 2 || !exceeds_behavior_count(n - 1, c, &log2).unwrap());
        }
    }

    #[test]
    fn daemon_choices_stay_within_enabled(
        enabled in prop::collection::btree_set(0usize..12, 0..8),
        step in 0usize..1000,
        seed in any::<u64>(),
        pick in prop::collection::vec(0usize..12, 0..6),
    ) {
        let enabled: Vec<usize> = enabled.into_iter().collect();
        let callback = {
            let pick = pick.clone();
            Arc::new(move |_: &[usize], _: usize| pick.clone())
        };
        let daemons = [
            Daemon::Synchronous,
            Daemon::central(),
            Daemon::Central(stabilab_core::scheduler::CentralPolicy::HighestIndex),
            Daemon::Random { seed },
            Daemon::Adversarial(Choice::Callback(callback)),
        ];
        for daemon in &daemons {
            match daemon.choose(&enabled, step) {
                Ok(chosen) => {
                    prop_assert!(chosen.iter().all(|v| enabled.contains(v)));
                    prop_assert_eq!(chosen.is_empty(), enabled.is_empty());
                    if matches!(daemon, Daemon::Synchronous) {
                        prop_assert_eq!(&chosen, &enabled);
                    }
                    if matches!(daemon, Daemon::Central(_)) && !enabled.is_empty() {
                        prop_assert_eq!(chosen.len(), 1);
                    }
                }
                // only a callback can break the contract, and it is caught
                Err(_) => prop_assert!(matches!(daemon, Daemon::Adversarial(_))),
            }
        }
        prop_assert_eq!(Daemon::Random { seed }.choose(&enabled, step), Daemon::Random { seed }.choose(&enabled, step));
    }

    #[test]
    fn steps_read_only_the_old_configuration(rs in rule_set(2, true), code in any::<u64>(), mask in any::<u32>(), n in 3usize..=6) {
        let a = Algorithm::from_rules("a", rs, 2).unwrap();
        let f = a.f();
        let ring = make_ring(n, true, Some(code)).unwrap();
        let ids = IdAssignment::new((1..=n as u64).map(|i| i * 3).collect(), 100).unwrap();
        let inst = Instance::new(&ring, &a, &ids).unwrap();
        let states: Vec<State> = (0..n).map(|v| (code >> (v as u32 * f)) & ((1 << f) - 1)).collect();
        let config = Configuration::new(f, states.clone()).unwrap();
        let enabled = inst.enabled_set(&config).unwrap();
        let active: Vec<usize> = enabled.iter().copied().filter(|&v| mask >> v & 1 == 1).collect();
        let next = inst.step(&config, &active).unwrap();
        for v in 0..n {
            let view: Vec<State> = ring.ports(v).iter().map(|&u| states[u]).collect();
            let want = if active.contains(&v) { a.evaluate(ids.id(v), states[v], &view).unwrap() } else { states[v] };
            prop_assert_eq!(next.state(v), want);
        }
        let mut reversed = active.clone();
        reversed.reverse();
        prop_assert_eq!(inst.step(&config, &reversed).unwrap(), next);
    }

    #[test]
    fn counterexamples_replay_and_leave_legality(b in behavior(1), n in 3usize..=5) {
        let alg = Algorithm::from_table("b", TransitionTable::anonymous(b));
        let ring = make_ring(n, false, None).unwrap();
        let ids = IdAssignment::sequential(n);
        let inst = Instance::new(&ring, &alg, &ids).unwrap();
        let spec = ProblemSpec::leader_election(0);
        let v = model_check_synchronous(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap();
        prop_assert_eq!(&v, &model_check_synchronous(&inst, &spec, DEFAULT_CONFIG_CAP).unwrap());
        // anonymous algorithms never solve leader election
        let cx = v.counterexample.expect("counterexample");
        let mut current = cx.initial.clone();
        for s in &cx.steps {
            current = inst.step(&current, &s.active).unwrap();
            prop_assert_eq!(&current, &s.config);
        }
        match cx.status {
            TraceStatus::Cycle { start, period } => {
                prop_assert_eq!(cx.config(start), cx.config(start + period));
                prop_assert!((start..start + period).any(|t| !spec.is_legal_states(&ring, cx.config(t).states())));
            }
            TraceStatus::FixedPoint { at } => prop_assert!(!spec.is_legal_states(&ring, cx.config(at).states())),
            other => prop_assert!(false, "unexpected status {:?}", other),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn large_id_ranges_always_hold_a_uniform_set(tables in prop::collection::vec(0u64..256, 1..=64), n in 17usize..=24) {
        // c = 3: floor(n^3) / 256 > n once n >= 17
        let cap = (n * n * n) as u64;
        prop_assume!(cap / 256 > n as u64);
        let per_id = (1..=cap)
            .map(|i| {
                let code = tables[(i as usize * 7919) % tables.len()] ^ (i % 256);
                Behavior::new(1, 2, (0..8).map(|k| (code >> k) & 1).collect()).unwrap()
            })
            .collect();
        let table = TransitionTable::per_id(per_id, Behavior::identity(1, 2).unwrap()).unwrap();
        let a = Algorithm::from_table("random", table);
        let (ids, b, size) = find_uniform_id_set(&a, n, Exponent::integer(3)).unwrap();
        prop_assert!(size >= n);
        for &i in ids.ids() {
            prop_assert_eq!(&extract_behavior(&a, i).unwrap(), &b);
        }
    }
}

#[test]
fn legality_ignores_non_specification_bits() {
    for n in 2..=4usize {
        let ring = make_ring(n, false, None).unwrap();
        for f in 1..=3u32 {
            let mut specs = Vec::new();
            for offset in 0..f {
                for width in 1..=f - offset {
                    specs.push(ProblemSpec::coloring(offset, width, None));
                    specs.push(ProblemSpec::spanning_tree(offset, width));
                }
                specs.push(ProblemSpec::leader_election(offset));
                specs.push(ProblemSpec::custom("zero", CustomRule::AllEqual(0), vec![SpecVar::new("z", offset, 1)]));
            }
            for spec in &specs {
                let spec_bits: u64 = spec.vars().iter().map(|v| ((1u64 << v.width) - 1) << v.offset).fold(0, |a, b| a | b);
                for code in 0..(1u64 << (f as usize * n)) {
                    let states: Vec<State> = (0..n).map(|v| (code >> (v as u32 * f)) & ((1 << f) - 1)).collect();
                    let verdict = spec.is_legal_states(&ring, &states);
                    for v in 0..n {
                        for bit in 0..f {
                            if spec_bits >> bit & 1 == 1 {
                                continue;
                            }
                            let mut flipped = states.clone();
                            flipped[v] ^= 1 << bit;
                            assert_eq!(spec.is_legal_states(&ring, &flipped), verdict, "{} {states:?}", spec.name());
                        }
                    }
                }
            }
        }
    }
}
