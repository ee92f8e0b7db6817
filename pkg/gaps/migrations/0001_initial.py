# Generated by Django 5.2.3 on 2025-07-14 09:12

import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='GapRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('variety_spec', models.CharField(max_length=255)),
                ('label', models.CharField(blank=True, max_length=255)),
                ('mode', models.CharField(choices=[('qq', 'Exact rational'), ('fp', 'Prime field')], max_length=2)),
                ('prime', models.BigIntegerField(blank=True, null=True)),
                ('seed', models.CharField(max_length=20)),
                ('trials', models.PositiveIntegerField()),
                ('margin', models.PositiveIntegerField()),
                ('nested', models.BooleanField(default=False)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('processing', 'Processing'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('m', models.PositiveIntegerField(blank=True, null=True)),
                ('d', models.PositiveIntegerField(blank=True, null=True)),
                ('c', models.PositiveIntegerField(blank=True, null=True)),
                ('epsilon', models.PositiveIntegerField(blank=True, null=True)),
                ('gap', models.JSONField(default=list)),
                ('variety_class', models.CharField(blank=True, max_length=64)),
                ('error', models.TextField(blank=True)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='CheckRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=64)),
                ('passed', models.BooleanField()),
                ('lhs', models.JSONField(blank=True, null=True)),
                ('rhs', models.JSONField(blank=True, null=True)),
                ('note', models.TextField(blank=True)),
                ('informational', models.BooleanField(default=False)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='checks', to='gaps.gaprun')),
            ],
        ),
        migrations.CreateModel(
            name='FaceRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('j', models.PositiveIntegerField()),
                ('dim_sigma', models.IntegerField()),
                ('dim_P_formula', models.IntegerField()),
                ('dim_B', models.IntegerField()),
                ('secant_nondefective', models.BooleanField()),
                ('eps_Y', models.IntegerField()),
                ('dim_IY2', models.IntegerField()),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='faces', to='gaps.gaprun')),
            ],
            options={
                'ordering': ['run', 'j'],
            },
        ),
    ]
