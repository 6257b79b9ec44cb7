use super::{DistanceKind, DistanceMatrix};
use crate::error::{Error, Result};
use crate::frame::RecordTable;
use crate::scalar::Scalar;

/// Mean Earth radius used for great-circle distances.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

fn check<T: Scalar>((lat, lon): (T, T)) -> Result<()> {
    let ok = lat.is_finite()
        && lon.is_finite()
        && lat >= T::lit(-90.0)
        && lat <= T::lit(90.0)
        && lon >= T::lit(-180.0)
        && lon <= T::lit(180.0);
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidCoordinate(format!("({lat}, {lon})")))
    }
}

/// Haversine distance in kilometres between `(latitude, longitude)` pairs in degrees.
pub fn geographic_distance<T: Scalar>(a: (T, T), b: (T, T)) -> Result<T> {
    check(a)?;
    check(b)?;
    let (phi1, phi2) = (a.0.to_radians(), b.0.to_radians());
    let dphi = (b.0 - a.0).to_radians();
    let dlambda = (b.1 - a.1).to_radians();
    let two = T::lit(2.0);
    let h = (dphi / two).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / two).sin().powi(2);
    let h = h.min(T::one()).max(T::zero());
    Ok(two * T::lit(EARTH_RADIUS_KM) * h.sqrt().asin())
}

/// Great-circle distances between every pair of records, in record order.
pub fn build_geo_matrix<T: Scalar>(records: &RecordTable) -> Result<DistanceMatrix<T>> {
    let mut coords = Vec::with_capacity(records.len());
    for r in records.iter() {
        let (lat, lon) = r.coordinates().ok_or_else(|| {
            Error::Metadata(format!("no coordinates for language {}", r.glottocode))
        })?;
        let point = (T::lit(lat), T::lit(lon));
        check(point)
            .map_err(|_| Error::InvalidCoordinate(format!("{}: ({lat}, {lon})", r.glottocode)))?;
        coords.push(point);
    }
    let ids = records.iter().map(|r| r.glottocode.clone()).collect();
    let mut failure = None;
    let dm = DistanceMatrix::from_fn(ids, DistanceKind::Geographic, |i, j| {
        geographic_distance(coords[i], coords[j]).unwrap_or_else(|e| {
            failure.get_or_insert(e);
            T::zero()
        })
    })?;
    match failure {
        Some(e) => Err(e),
        None => Ok(dm),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::LanguageRecord;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn at(id: &str, lat: f64, lon: f64) -> LanguageRecord {
        LanguageRecord {
            latitude: Some(lat),
            longitude: Some(lon),
            ..LanguageRecord::leaf(id)
        }
    }

    #[test]
    fn analytic_arcs() {
        assert_eq!(
            geographic_distance((12.5, -40.0), (12.5, -40.0)).unwrap(),
            0.0
        );
        let quarter: f64 = geographic_distance((0.0, 0.0), (90.0, 0.0)).unwrap();
        assert_abs_diff_eq!(quarter, PI / 2.0 * EARTH_RADIUS_KM, epsilon = 1e-9);
        let half: f64 = geographic_distance((0.0, 0.0), (0.0, 180.0)).unwrap();
        assert_abs_diff_eq!(half, PI * EARTH_RADIUS_KM, epsilon = 1e-9);
    }

    #[test]
    fn out_of_range() {
        assert!(geographic_distance((91.0, 0.0), (0.0, 0.0)).is_err());
        assert!(geographic_distance((0.0, 0.0), (0.0, -180.5)).is_err());
    }

    #[test]
    fn matrix_from_records() {
        let t = RecordTable::new(vec![at("a", 0.0, 0.0), at("b", 0.0, 180.0)]).unwrap();
        let dm: DistanceMatrix<f64> = build_geo_matrix(&t).unwrap();
        assert_abs_diff_eq!(dm.get(0, 1), 20015.086796020572, epsilon = 1e-6);
        assert_eq!(dm.kind(), DistanceKind::Geographic);

        let one = RecordTable::new(vec![at("a", 10.0, 10.0)]).unwrap();
        assert_eq!(build_geo_matrix::<f64>(&one).unwrap().get(0, 0), 0.0);

        let t = RecordTable::new(vec![at("a", 0.0, 0.0), LanguageRecord::leaf("nowhere")]).unwrap();
        let err = build_geo_matrix::<f64>(&t).unwrap_err();
        assert!(err.to_string().contains("nowhere"));
    }
}
