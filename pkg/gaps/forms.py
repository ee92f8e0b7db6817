from dataclasses import dataclass

from django import forms

from .dims import RankConfig
from .exactalg import FieldContext
from .exceptions import SpecError
from .variety import expand_range, parse_spec

MAX_SEED = (1 << 64) - 1


@dataclass(frozen=True)
class RunConfig:
    """Validated options of one compute/verify run."""
    variety: str
    mode: str = 'fp'
    seed: int = 0
    trials: int = 3
    margin: int = 25
    prime_index: int = 0
    workers: int = 1
    nested: bool = False
    record: bool = False
    out: str = ''
    format: str = 'json'

    @property
    def ctx(self):
        return FieldContext.from_mode(self.mode, self.prime_index)

    def rank_config(self):
        return RankConfig(
            ctx=self.ctx,
            seed=self.seed,
            margin=self.margin,
            max_trials=self.trials,
            nested=self.nested,
            workers=self.workers,
        )


class ComputationOptionsForm(forms.Form):
    """Options shared by every command that runs gap vector computations."""
    MODES = [
        ('fp', 'Prime field'),
        ('qq', 'Exact rational'),
    ]

    mode = forms.ChoiceField(choices=MODES)
    seed = forms.IntegerField(min_value=0, max_value=MAX_SEED)
    trials = forms.IntegerField(min_value=2)
    margin = forms.IntegerField(min_value=1)
    prime_index = forms.IntegerField(min_value=0)
    workers = forms.IntegerField(min_value=1)
    nested = forms.BooleanField(required=False)
    record = forms.BooleanField(required=False)
    out = forms.CharField(required=False)

    def error_text(self):
        """Flatten errors into one line per field for the error stream."""
        return '; '.join(
            f"{field}: {' '.join(messages)}" if field != '__all__' else ' '.join(messages)
            for field, messages in self.errors.items()
        )


class RunConfigForm(ComputationOptionsForm):
    """Form for validating compute/verify options."""
    OUTPUT_FORMATS = [
        ('json', 'JSON'),
        ('csv', 'CSV'),
    ]

    variety = forms.CharField()
    format = forms.ChoiceField(choices=OUTPUT_FORMATS)

    def clean_variety(self):
        variety = self.cleaned_data.get('variety', '').strip()
        try:
            parse_spec(variety)
        except SpecError as exc:
            raise forms.ValidationError(str(exc)) from exc
        return variety

    def run_config(self):
        data = self.cleaned_data
        return RunConfig(**{field: data[field] for field in RunConfig.__dataclass_fields__})


class SweepForm(ComputationOptionsForm):
    """Form for validating a sweep: a range spec plus computation options."""
    range_spec = forms.CharField()

    def clean_range_spec(self):
        range_spec = self.cleaned_data.get('range_spec', '').strip()
        try:
            instances = expand_range(range_spec)
            for instance in instances:
                parse_spec(instance)
        except SpecError as exc:
            raise forms.ValidationError(str(exc)) from exc
        self.instances = instances
        return range_spec

    def run_configs(self):
        """One RunConfig per instance of the range, in range order."""
        data = self.cleaned_data
        shared = {field: data[field] for field in ComputationOptionsForm.base_fields}
        return [RunConfig(variety=instance, format='csv', **shared) for instance in self.instances]
