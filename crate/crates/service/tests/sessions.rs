use std::fs;
use std::net::TcpListener;

use fdaa_core::assessment::{CgsLabel, Ogs};
use fdaa_core::go::{Color, Coord};
use fdaa_engine::EngineConfig;
use fdaa_service::{
    read_log, replay, replay_file, Event, GameConfig, GameSession, ReplayError, ServiceError,
    Status,
};
use proptest::prelude::*;

fn stub(seed: u64) -> GameConfig {
    GameConfig {
        engine: EngineConfig::stub(seed),
        ..GameConfig::default()
    }
}

/// Plays `n` moves, each time following the suggestion at `pick(ply)`.
fn play(session: &mut GameSession, n: u32, pick: impl Fn(u32) -> usize) {
    for ply in 0..n {
        let snap = session.snapshot();
        let s = &snap.suggestions[pick(ply) % snap.suggestions.len()];
        session.submit_move(snap.to_move, s.coord).unwrap();
    }
}

#[test]
fn creation_shows_empty_board_and_opening_suggestions() {
    let a = GameSession::create(stub(42), None).unwrap();
    let b = GameSession::create(stub(42), None).unwrap();
    assert_ne!(a.id(), b.id());
    let snap = a.snapshot();
    assert_eq!(snap.ply, 0);
    assert_eq!(snap.to_move, Color::Black);
    assert!(snap.board.iter().all(|row| row == &".".repeat(19)));
    assert_eq!(snap.suggestions.len(), 5);
    assert_eq!(a.log().entries().len(), 1);
}

#[test]
fn unreachable_engine_persists_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let port = TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut engine = EngineConfig::http(format!("http://127.0.0.1:{port}/"));
    engine.timeout_ms = 500;
    let config = GameConfig {
        engine,
        ..GameConfig::default()
    };
    assert!(matches!(
        GameSession::create(config, Some(dir.path())),
        Err(ServiceError::Engine(_))
    ));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn situation_appears_after_move_ten() {
    let mut s = GameSession::create(stub(7), None).unwrap();
    play(&mut s, 11, |_| 0);
    let frames = s.frames();
    assert_eq!(frames[4].move_no, 5);
    assert!(frames[4].cgs.is_none());
    assert!(frames[9].cgs.is_none());
    let cgs = frames[10].cgs.as_ref().expect("move 11 is assessed");
    assert!(CgsLabel::ALL.contains(&cgs.label));
    assert_eq!(frames[10].suggestions.len(), 5);
    assert_eq!(frames[10].to_move, Color::White);
    assert_eq!(frames[10].matched_rank, Some(1));
}

#[test]
fn illegal_move_changes_nothing() {
    let mut s = GameSession::create(stub(3), None).unwrap();
    s.submit_move(Color::Black, "D4".parse().unwrap()).unwrap();
    let before = s.state();
    let log_len = s.log().entries().len();
    for (c, v) in [(Color::White, "D4"), (Color::Black, "Q16")] {
        let err = s.submit_move(c, v.parse().unwrap()).unwrap_err();
        assert!(matches!(err, ServiceError::Engine(fdaa_engine::EngineError::Illegal(_))), "{err:?}");
    }
    assert_eq!(s.state(), before);
    assert_eq!(s.log().entries().len(), log_len);
    assert_eq!(s.snapshot().ply, 1);
}

#[test]
fn finishing_twice_is_refused() {
    let mut s = GameSession::create(stub(5), None).unwrap();
    play(&mut s, 12, |_| 0);
    let report = s.finish(None).unwrap();
    assert_eq!(report.method2.unwrap().correct, None);
    assert_eq!(report.method1.unwrap().correct, None);
    let len = s.log().entries().len();
    assert!(matches!(s.finish(Some("B+R")), Err(ServiceError::Finished(_))));
    assert!(matches!(
        s.submit_move(Color::White, Coord::Pass),
        Err(ServiceError::Finished(_))
    ));
    assert_eq!(s.log().entries().len(), len);
    assert_eq!(s.status(), Status::Finished);
}

#[test]
fn white_leaning_game_closes_for_white() {
    let mut engine = EngineConfig::stub(11);
    engine.bias = Some(Color::White);
    let mut s = GameSession::create(
        GameConfig {
            engine,
            ..GameConfig::default()
        },
        None,
    )
    .unwrap();
    play(&mut s, 30, |ply| (ply as usize / 2) % 3);
    let report = s.finish(Some("W+R")).unwrap();
    let m2 = report.method2.unwrap();
    assert_eq!(m2.verdict, Ogs::FavorableToWhite, "{m2:?}");
    assert_eq!(m2.correct, Some(true));
    let text = report.commentary_text.unwrap();
    assert!(
        text.ends_with("Overall game situation is favorable to White.\n"),
        "{text}"
    );
}

#[test]
fn replaying_the_file_rebuilds_the_live_state() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = GameSession::create(stub(42), Some(dir.path())).unwrap();
    play(&mut s, 40, |ply| (ply as usize * 7) % 5);
    s.finish(Some("B+3.5")).unwrap();
    let path = s.log().path().unwrap().to_path_buf();
    let replayed = replay_file(&path).unwrap();
    assert_eq!(replayed, s.state());
    assert_eq!(replayed.cgs.len(), 30);
    // Bit-equal, not merely close.
    for (a, b) in replayed.cgs.iter().zip(s.state().cgs.iter()) {
        assert_eq!(a.crisp_cgs.to_bits(), b.crisp_cgs.to_bits());
    }
    let moves = read_log(&path)
        .unwrap()
        .iter()
        .filter(|e| matches!(e.event, Event::Move { .. }))
        .count();
    assert_eq!(moves, 40);
}

#[test]
fn replay_of_a_new_game_is_an_empty_board() {
    let dir = tempfile::tempdir().unwrap();
    let s = GameSession::create(stub(1), Some(dir.path())).unwrap();
    let r = replay_file(s.log().path().unwrap()).unwrap();
    assert!(r.moves.is_empty());
    assert_eq!(r.status, Status::Open);
    assert_eq!(r, s.state());
}

#[test]
fn damaged_logs_name_the_missing_entry() {
    let dir = tempfile::tempdir().unwrap();
    let mut s = GameSession::create(stub(2), Some(dir.path())).unwrap();
    play(&mut s, 6, |_| 1);
    let path = s.log().path().unwrap().to_path_buf();
    let text = fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 13);

    // Cut in the middle of the last line.
    let cut = &text[..text.len() - 40];
    fs::write(&path, cut).unwrap();
    assert!(matches!(replay_file(&path), Err(ReplayError::Missing(13))));

    // Drop a whole line in the middle.
    let mut gap = lines.clone();
    gap.remove(4);
    fs::write(&path, gap.join("\n")).unwrap();
    let err = replay_file(&path).unwrap_err();
    assert!(matches!(err, ReplayError::Missing(5)), "{err:?}");
    assert!(err.to_string().contains('5'));

    // A move whose frame never made it.
    fs::write(&path, lines[..12].join("\n")).unwrap();
    assert!(matches!(replay_file(&path), Err(ReplayError::Missing(13))));
}

#[test]
fn tampered_frames_are_detected() {
    let mut s = GameSession::create(stub(4), None).unwrap();
    play(&mut s, 12, |_| 0);
    let mut entries = s.log().entries().to_vec();
    if let Event::Frame(f) = &mut entries[24].event {
        f.cgs.as_mut().unwrap().crisp_cgs += 1.0;
    } else {
        panic!("entry 25 should be a frame");
    }
    assert!(matches!(
        replay(&entries),
        Err(ReplayError::Inconsistent { seq: 25, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn live_and_replayed_state_agree(seed in 0u64..1000, picks in prop::collection::vec(0usize..5, 1..30), finish in any::<bool>()) {
        let mut s = GameSession::create(stub(seed), None).unwrap();
        for p in &picks {
            let snap = s.snapshot();
            let choice = snap.suggestions[p % snap.suggestions.len()].coord;
            s.submit_move(snap.to_move, choice).unwrap();
        }
        if finish {
            s.finish(Some("B+R")).unwrap();
        }
        let entries = s.log().entries();
        for (i, e) in entries.iter().enumerate() {
            prop_assert_eq!(e.seq, i as u64 + 1);
        }
        prop_assert_eq!(replay(entries).unwrap(), s.state());
    }
}
