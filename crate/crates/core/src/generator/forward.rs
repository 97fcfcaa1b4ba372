use crate::level::ActivationVolume;
use crate::scalar::Scalar;

use super::{GeneratorWeights, LatentVector, Layer};

/// Transposed 2-d convolution, scattering each input pixel through the kernel.
///
/// `weight` is `[in_channels, out_channels, kh, kw]`; sums accumulate in f64.
pub fn conv_transpose2d<T: Scalar>(
    input: &ActivationVolume<T>,
    weight: &[T],
    bias: Option<&[T]>,
    out_channels: usize,
    kernel: [usize; 2],
    stride: usize,
    padding: usize,
) -> ActivationVolume<T> {
    let [cin, h, w] = input.shape();
    let [kh, kw] = kernel;
    assert_eq!(weight.len(), cin * out_channels * kh * kw, "weight size");
    // Full (unpadded) output, cropped by `padding` on every side afterwards.
    let (fh, fw) = ((h - 1) * stride + kh, (w - 1) * stride + kw);
    let (oh, ow) = (fh - 2 * padding, fw - 2 * padding);
    let mut acc = vec![0f64; out_channels * oh * ow];

    let weight: Vec<f64> = weight.iter().map(|v| v.widen()).collect();
    for ci in 0..cin {
        for iy in 0..h {
            for ix in 0..w {
                let x = input.at(ci, iy, ix).widen();
                if x == 0.0 {
                    continue;
                }
                for co in 0..out_channels {
                    let kbase = ((ci * out_channels) + co) * kh * kw;
                    let obase = co * oh * ow;
                    for ky in 0..kh {
                        let Some(oy) = (iy * stride + ky).checked_sub(padding).filter(|y| *y < oh) else {
                            continue;
                        };
                        let row = &weight[kbase + ky * kw..kbase + (ky + 1) * kw];
                        for (kx, wv) in row.iter().enumerate() {
                            if let Some(ox) = (ix * stride + kx).checked_sub(padding).filter(|v| *v < ow) {
                                acc[obase + oy * ow + ox] += x * wv;
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some(bias) = bias {
        for (co, b) in bias.iter().enumerate() {
            let b = b.widen();
            acc[co * oh * ow..(co + 1) * oh * ow].iter_mut().for_each(|v| *v += b);
        }
    }
    ActivationVolume::from_vec([out_channels, oh, ow], acc.into_iter().map(T::narrow).collect())
}

/// Inference-mode batch normalisation using running statistics.
pub fn batch_norm<T: Scalar>(
    input: &ActivationVolume<T>,
    scale: &[T],
    shift: &[T],
    mean: &[T],
    var: &[T],
    eps: f64,
) -> ActivationVolume<T> {
    let [c, h, w] = input.shape();
    let plane = h * w;
    let mut out = input.clone();
    for ch in 0..c {
        let inv = 1.0 / (var[ch].widen() + eps).sqrt();
        let (m, g, b) = (mean[ch].widen(), scale[ch].widen(), shift[ch].widen());
        for v in &mut out.data_mut()[ch * plane..(ch + 1) * plane] {
            *v = T::narrow((v.widen() - m) * inv * g + b);
        }
    }
    out
}

/// Runs the full layer stack on a latent vector reshaped to 10x1x1.
pub fn forward<T: Scalar>(weights: &GeneratorWeights<T>, latent: &LatentVector<T>) -> ActivationVolume<T> {
    let mut x = ActivationVolume::from_vec(GeneratorWeights::<T>::INPUT_SHAPE, latent.values().to_vec());
    for layer in weights.layers() {
        x = match layer {
            Layer::ConvTranspose2d { out_channels, kernel, stride, padding, weight, bias, .. } => {
                conv_transpose2d(&x, weight, bias.as_deref(), *out_channels, *kernel, *stride, *padding)
            }
            Layer::BatchNorm2d { eps, scale, shift, running_mean, running_var, .. } => {
                batch_norm(&x, scale, shift, running_mean, running_var, *eps)
            }
            Layer::Relu { .. } => x.map(|v| if v > T::zero() { v } else { T::zero() }),
            Layer::Tanh { .. } => x.map(|v| T::narrow(v.widen().tanh())),
        };
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::generate_level;
    use crate::level::{Level, TileType};

    #[test]
    fn hand_computed_two_by_two() {
        // in = [[1,2],[3,4]], kernel = [[1,0],[0,1]], stride 1, no padding.
        let input = ActivationVolume::from_vec([1, 2, 2], vec![1.0f64, 2.0, 3.0, 4.0]);
        let out = conv_transpose2d(&input, &[1.0, 0.0, 0.0, 1.0], None, 1, [2, 2], 1, 0);
        assert_eq!(out.shape(), [1, 3, 3]);
        assert_eq!(out.data(), &[1.0, 2.0, 0.0, 3.0, 5.0, 2.0, 0.0, 3.0, 4.0]);
    }

    #[test]
    fn hand_computed_stride_two_with_padding() {
        // 1x1 input of 2 through a 4x4 kernel 1..16, stride 2, padding 1:
        // the 4x4 scatter is cropped to its central 2x2.
        let input = ActivationVolume::from_vec([1, 1, 1], vec![2.0f32]);
        let kernel: Vec<f32> = (1..=16).map(|v| v as f32).collect();
        let out = conv_transpose2d(&input, &kernel, Some(&[0.5]), 1, [4, 4], 2, 1);
        assert_eq!(out.shape(), [1, 2, 2]);
        assert_eq!(out.data(), &[12.5, 14.5, 20.5, 22.5]);
    }

    #[test]
    fn batch_norm_inference() {
        let input = ActivationVolume::from_vec([2, 1, 1], vec![3.0f64, -1.0]);
        let out = batch_norm(&input, &[2.0, 1.0], &[0.5, 0.0], &[1.0, 0.0], &[4.0 - 1e-5, 1.0 - 1e-5], 1e-5);
        let expected = [(3.0 - 1.0) / 2.0 * 2.0 + 0.5, -1.0];
        for (a, b) in out.data().iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_weights_give_zero_volume() {
        let weights = GeneratorWeights::<f32>::reference_with(|_, role, _| match role {
            "running_var" | "scale" => 1.0,
            _ => 0.0,
        });
        let out = forward(&weights, &LatentVector::clamped([0.7; 10]));
        assert_eq!(out.shape(), [7, 32, 32]);
        assert!(out.data().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn biased_channel_six_wins() {
        let last = 3 * 3; // deconv4 is the tenth layer
        let weights = GeneratorWeights::<f32>::reference_with(|layer, role, i| match (layer, role) {
            (l, "bias") if l == last => {
                if i == 6 {
                    1.0
                } else {
                    0.0
                }
            }
            (_, "running_var" | "scale") => 1.0,
            (_, "weight") => 0.01,
            _ => 0.0,
        });
        let level = generate_level(&weights, &LatentVector::clamped([0.3; 10])).unwrap();
        assert_eq!(level, Level::filled(TileType::SolidGround));
    }

    #[test]
    fn deterministic_and_bounded() {
        let weights = GeneratorWeights::<f32>::reference_random(11);
        let z = LatentVector::clamped([0.1, -0.4, 0.9, -1.0, 0.0, 0.3, 0.5, -0.2, 0.8, -0.6]);
        let a = forward(&weights, &z);
        let b = forward(&weights, &z);
        assert_eq!(a, b);
        assert!(a.data().iter().all(|v| (-1.0..=1.0).contains(v)));
    }
}
