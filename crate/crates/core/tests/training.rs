use chrono::NaiveDate;
use oilcast_core::data::{make_supervised_windows, AlignedFrame, SupervisedTensors};
use oilcast_core::nn::{init_params, LstmConfig, LstmModel};
use oilcast_core::synthetic::{business_days, sine, white_noise};
use oilcast_core::train::{evaluate, predict, train, TrainConfig};
use proptest::prelude::*;

fn small_config(dropout_rate: f64) -> LstmConfig {
    LstmConfig { input_dim: 2, hidden_dim: 8, lookback: 6, dense_dim: 8, dropout_rate }
}

/// Two features (a scaled sine and noise) with the sine as target, all in [0, 1].
fn tensors(n: usize, lookback: usize) -> SupervisedTensors {
    let s: Vec<f64> = sine(n, 25.0, 0.3).into_iter().map(|v| 0.5 + 0.4 * v).collect();
    let e: Vec<f64> = white_noise(n, 3).into_iter().map(|v| 0.5 + 0.1 * v.clamp(-4.0, 4.0)).collect();
    let dates = business_days(NaiveDate::from_ymd_opt(2015, 1, 5).unwrap(), n);
    let frame = AlignedFrame::new(dates, vec![("s".into(), s), ("e".into(), e)]).unwrap();
    make_supervised_windows(&frame, &["s".into(), "e".into()], "s", lookback).unwrap()
}

fn quick() -> TrainConfig {
    TrainConfig { epochs: 4, batch_size: 16, seed: 11, ..TrainConfig::default() }
}

#[test]
fn identical_seed_gives_bitwise_identical_training() {
    let cfg = small_config(0.2);
    let data = tensors(220, cfg.lookback);
    let init = init_params(&cfg, 5).unwrap();
    let (p1, h1) = train(&init, &cfg, &data, &quick()).unwrap();
    let (p2, h2) = train(&init, &cfg, &data, &quick()).unwrap();
    assert_eq!(
        p1.flatten().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        p2.flatten().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
    assert_eq!(h1.to_csv(), h2.to_csv());
    assert_eq!(h1.train_loss.len(), 4);
    assert_eq!(h1.val_loss.len(), 4);

    let (p3, _) = train(&init, &cfg, &data, &TrainConfig { seed: 12, ..quick() }).unwrap();
    assert_ne!(p1, p3, "dropout stream should depend on the seed");
}

#[test]
fn shuffling_is_seeded() {
    let cfg = small_config(0.0);
    let data = tensors(220, cfg.lookback);
    let init = init_params(&cfg, 5).unwrap();
    let shuffled = TrainConfig { shuffle: true, ..quick() };
    let (a, _) = train(&init, &cfg, &data, &shuffled).unwrap();
    let (b, _) = train(&init, &cfg, &data, &shuffled).unwrap();
    let (c, _) = train(&init, &cfg, &data, &quick()).unwrap();
    assert_eq!(a, b);
    assert_ne!(a, c);
}

#[test]
fn validation_targets_never_reach_a_gradient() {
    let cfg = small_config(0.2);
    let mut data = tensors(220, cfg.lookback);
    let tcfg = quick();
    let (n_train, n_val) = tcfg.partition(data.len());
    assert!(n_val > 0);
    let init = init_params(&cfg, 5).unwrap();
    let (clean, clean_hist) = train(&init, &cfg, &data, &tcfg).unwrap();
    for t in &mut data.targets[n_train..] {
        *t = f64::NAN;
    }
    let (poisoned, hist) = train(&init, &cfg, &data, &tcfg).unwrap();
    assert_eq!(clean, poisoned);
    assert_eq!(clean_hist.train_loss, hist.train_loss);
    assert!(hist.train_loss.iter().all(|l| l.is_finite()));
    assert!(hist.val_loss.iter().all(|l| l.is_nan()));
}

#[test]
fn poisoned_training_target_is_reported_with_position() {
    let cfg = small_config(0.0);
    let mut data = tensors(220, cfg.lookback);
    data.targets[40] = f64::NAN;
    let err = train(&init_params(&cfg, 5).unwrap(), &cfg, &data, &quick()).unwrap_err();
    assert!(matches!(err, oilcast_core::Error::NanLoss { epoch: 1, batch: 3 }), "{err:?}");
}

#[test]
fn constant_target_is_learned() {
    let cfg = LstmConfig { input_dim: 2, hidden_dim: 8, lookback: 6, dense_dim: 8, dropout_rate: 0.0 };
    let mut data = tensors(400, cfg.lookback);
    for t in &mut data.targets {
        *t = 0.6;
    }
    let tcfg = TrainConfig { epochs: 50, seed: 2, ..TrainConfig::default() };
    let (_, hist) = train(&init_params(&cfg, 9).unwrap(), &cfg, &data, &tcfg).unwrap();
    let last = *hist.train_loss.last().unwrap();
    assert!(last < 1e-4, "final training loss {last}");
}

#[test]
fn loss_trends_down_on_a_learnable_series() {
    let cfg = small_config(0.0);
    let data = tensors(400, cfg.lookback);
    let tcfg = TrainConfig { epochs: 30, batch_size: 16, learning_rate: 0.005, ..TrainConfig::default() };
    let (_, hist) = train(&init_params(&cfg, 1).unwrap(), &cfg, &data, &tcfg).unwrap();
    let head: f64 = hist.val_loss[..5].iter().sum();
    let tail: f64 = hist.val_loss[25..].iter().sum();
    assert!(tail < 0.5 * head, "head {head} tail {tail}");
}

#[test]
fn single_sample_prediction_matches_batched() {
    let cfg = small_config(0.2);
    let data = tensors(60, cfg.lookback);
    let params = init_params(&cfg, 4).unwrap();
    let batched = predict(&params, &cfg, &data.inputs).unwrap();
    for i in [0, 17, data.len() - 1] {
        let single = predict(&params, &cfg, data.sample(i)).unwrap();
        assert!((single[0] - batched[i]).abs() < 1e-12);
    }
    assert_eq!(batched, predict(&params, &cfg, &data.inputs).unwrap());
}

#[test]
fn checkpoint_round_trip_predicts_identically() {
    let cfg = small_config(0.2);
    let data = tensors(220, cfg.lookback);
    let (params, _) = train(&init_params(&cfg, 5).unwrap(), &cfg, &data, &quick()).unwrap();
    let before = predict(&params, &cfg, &data.inputs).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.bin");
    LstmModel { config: cfg, params, seed: 5 }.save(&path).unwrap();
    let loaded = LstmModel::load(&path).unwrap();
    let after = predict(&loaded.params, &loaded.config, &data.inputs).unwrap();
    assert_eq!(
        before.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
        after.iter().map(|v| v.to_bits()).collect::<Vec<_>>()
    );
}

proptest! {
    #[test]
    fn metric_identities(pairs in proptest::collection::vec((1.0f64..500.0, -500.0f64..500.0), 1..200)) {
        let t: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let p: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let m = evaluate(&t, &p).unwrap();
        prop_assert!((m.rmse * m.rmse - m.mse).abs() <= 1e-9 * m.mse.max(1.0));
        prop_assert!(m.mae <= m.rmse * (1.0 + 1e-12));
        prop_assert!(m.mse >= 0.0 && m.mape >= 0.0);
    }
}
